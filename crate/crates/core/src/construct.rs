//! Chunk-by-chunk construction of edge-disjoint augmenting trails.
//!
//! Given a triangle-free 2-matching `apx` and a triangle-free 2-matching
//! `opt` that dominates it in degree at every node, the constructor builds
//! `|opt| - |apx|` edge-disjoint trails inside `apx △ opt`, each augmenting
//! for `apx` on its own. Trails grow by chunks: alternating trails of one to
//! three edges in which every two consecutive edges close a triangle of
//! `apx ∪ opt`.
//!
//! Candidate chunks are not derived from a case analysis. Every chunk of
//! free edges is enumerated and filtered against the construction
//! invariant; the existence results that guarantee a surviving candidate
//! become runtime assertions. A failed assertion stops the construction
//! with a serialisable dump of the state and of every rejected candidate.
//!
//! Invariant kept for trails `P_1..P_k`, with `U_j` the union of the first
//! `j` trails:
//!
//! 1. each trail is a concatenation of edge-disjoint chunks;
//! 2. `P_j ⊆ (apx △ opt) \ U_{j-1}`;
//! 3. for `j < k`, `P_j` is augmenting and both its end nodes are deficient
//!    with respect to `U_{j-1}`; `P_k` starts with an `opt` edge at a node
//!    deficient with respect to `U_{k-1}`;
//! 4. `apx △ P_j` has no triangle;
//! 5. `opt △ U_j` has no triangle.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::GraphError;
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};
use crate::trail::{is_alternating, is_augmenting, Trail};

/// Which side of `apx △ opt` an edge lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// In `apx \ opt`.
    Apx,
    /// In `opt \ apx`.
    Opt,
}

impl Side {
    fn other(self) -> Side {
        match self {
            Side::Apx => Side::Opt,
            Side::Opt => Side::Apx,
        }
    }
}

/// An alternating trail of one to three edges of `apx △ opt`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Chunk {
    pub trail: Trail,
    pub sides: Vec<Side>,
}

impl Chunk {
    pub fn edges(&self) -> &[EdgeId] {
        self.trail.edges()
    }

    pub fn first_edge(&self) -> EdgeId {
        self.trail.first_edge().expect("chunks are non-empty")
    }

    pub fn len(&self) -> usize {
        self.trail.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trail.is_empty()
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.trail.fmt(f)
    }
}

/// A trail kept as the list of chunks it was built from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChunkedTrail {
    pub chunks: Vec<Chunk>,
    pub trail: Trail,
}

impl ChunkedTrail {
    fn push(&mut self, chunk: Chunk) {
        self.trail = self
            .trail
            .concat(&chunk.trail)
            .expect("candidate chunks extend the trail");
        self.chunks.push(chunk);
    }
}

/// How tie-break rules 2 and 3 count triangles for a candidate chunk.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleCount {
    /// Triangles through the chunk's first edge.
    #[default]
    FirstEdge,
    /// Distinct triangles through any edge of the chunk.
    WholeChunk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// `apx △ P` would contain a triangle.
    ApxTriangle,
    /// `opt △ U` would contain a triangle.
    OptTriangle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FilterCounts {
    pub enumerated: usize,
    pub rejected_apx_triangle: usize,
    pub rejected_opt_triangle: usize,
    pub accepted: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakRule {
    /// New trail: no rule applies.
    FreshTrail,
    SingleCandidate,
    /// Kept candidates whose first edge closes a triangle with the last edge.
    SharesTriangle,
    /// Last edge in `apx`: fewest triangles with two `opt` edges.
    FewestOptTriangles,
    /// Last edge in `opt`: fewest triangles with two `apx` edges.
    FewestApxTriangles,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TieBreakTrace {
    pub rule: TieBreakRule,
    pub candidates: usize,
    pub kept: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub walk: String,
    pub reason: Rejection,
}

/// Every enumerated chunk for the next step, split by the filter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidates {
    pub phase: Phase,
    /// Accepted chunks in ascending edge-id order.
    pub kept: Vec<Chunk>,
    pub rejected: Vec<RejectedCandidate>,
    pub counts: FilterCounts,
}

/// One line of the construction trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    pub trail_index: usize,
    pub chunk_edges: Vec<EdgeId>,
    pub chunk_walk: String,
    pub filter_counts: FilterCounts,
    pub tiebreak: TieBreakTrace,
    pub deficient_nodes_before: Vec<NodeId>,
}

/// Serialisable snapshot used in error reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StateDump {
    pub node_count: usize,
    pub edges: Vec<(NodeId, NodeId)>,
    pub apx: Vec<EdgeId>,
    pub opt: Vec<EdgeId>,
    pub finished: Vec<Vec<String>>,
    pub current: Option<Vec<String>>,
    pub rejected: Vec<RejectedCandidate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    FirstChunk,
    Extension,
}

/// A broken construction invariant or proof assertion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    NotAChunk { trail_index: usize, chunk_index: usize },
    NotAlternating { trail_index: usize },
    EdgeOutsideDifference { trail_index: usize, edge: EdgeId },
    EdgeReused { trail_index: usize, edge: EdgeId },
    NotAugmenting { trail_index: usize },
    EndNodeNotDeficient { trail_index: usize, node: NodeId },
    FirstEdgeNotOpt { trail_index: usize },
    ApxTriangle { trail_index: usize, nodes: [NodeId; 3] },
    OptTriangle { trail_index: usize, nodes: [NodeId; 3] },
    /// Degree above two in `apx △ P_j`.
    ApxDegree { trail_index: usize, node: NodeId, degree: usize },
    /// Degree above two in `opt △ U_j`.
    OptDegree { trail_index: usize, node: NodeId, degree: usize },
    /// An edge of the current trail in several triangles of `apx △ P_k` or `opt △ U_k`.
    TriangleMultiplicity { edge: EdgeId, side: Side, count: usize },
    /// A node deficient w.r.t. the used edges but not w.r.t. the empty set.
    DeficiencyLost { node: NodeId },
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ConstructError {
    #[error("{0} is not a triangle-free 2-matching")]
    InfeasibleInput(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no valid chunk in phase {phase:?}")]
    NoCandidate { phase: Phase, dump: Box<StateDump> },
    #[error("construction invariant broken: {diagnostics:?}")]
    InvariantBroken {
        diagnostics: Vec<Diagnostic>,
        dump: Box<StateDump>,
    },
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ConstructError {
    /// State dump attached to assertion failures.
    pub fn dump(&self) -> Option<&StateDump> {
        match self {
            ConstructError::NoCandidate { dump, .. } | ConstructError::InvariantBroken { dump, .. } => {
                Some(dump)
            }
            _ => None,
        }
    }
}

fn validate_inputs(g: &Graph, apx: &EdgeSet, opt: &EdgeSet) -> Result<(), ConstructError> {
    if !apx.is_owned_by(g) || !opt.is_owned_by(g) {
        return Err(GraphError::OwnerMismatch.into());
    }
    if !g.is_feasible(apx) {
        return Err(ConstructError::InfeasibleInput("apx"));
    }
    if !g.is_feasible(opt) {
        return Err(ConstructError::InfeasibleInput("opt"));
    }
    Ok(())
}

/// Every node has at least the `apx` degree in `opt`.
pub fn degree_dominates(g: &Graph, apx: &EdgeSet, opt: &EdgeSet) -> bool {
    g.nodes()
        .all(|u| g.degree_in_unchecked(u, apx) <= g.degree_in_unchecked(u, opt))
}

/// `opt` is strictly larger than `apx` and dominates it in degree.
pub fn check_preconditions(g: &Graph, apx: &EdgeSet, opt: &EdgeSet) -> Result<bool, ConstructError> {
    validate_inputs(g, apx, opt)?;
    Ok(opt.len() > apx.len() && degree_dominates(g, apx, opt))
}

/// The proof-machine state: finished trails, the trail under construction,
/// and the used edges.
#[derive(Clone, Debug)]
pub struct ConstructionState<'g> {
    g: &'g Graph,
    apx: EdgeSet,
    opt: EdgeSet,
    diff: EdgeSet,
    union: EdgeSet,
    finished: Vec<ChunkedTrail>,
    current: Option<ChunkedTrail>,
    /// Edges of the finished trails.
    finished_edges: EdgeSet,
    /// Edges of the finished trails and the current one.
    used: EdgeSet,
    q: usize,
    count_mode: TriangleCount,
}

impl<'g> ConstructionState<'g> {
    pub fn new(g: &'g Graph, apx: &EdgeSet, opt: &EdgeSet) -> Result<Self, ConstructError> {
        validate_inputs(g, apx, opt)?;
        Ok(Self {
            g,
            apx: apx.clone(),
            opt: opt.clone(),
            diff: apx.symmetric_difference(opt)?,
            union: apx.union(opt)?,
            finished: Vec::new(),
            current: None,
            finished_edges: g.empty_set(),
            used: g.empty_set(),
            q: opt.len().saturating_sub(apx.len()),
            count_mode: TriangleCount::default(),
        })
    }

    /// Rebuilds a state from trails given as walks, without validating them.
    /// Intended for replaying dumps and exercising the diagnostics.
    pub fn from_walks(
        g: &'g Graph,
        apx: &EdgeSet,
        opt: &EdgeSet,
        finished: &[Vec<Vec<NodeId>>],
        current: Option<&[Vec<NodeId>]>,
    ) -> Result<Self, ConstructError> {
        let mut state = Self::new(g, apx, opt)?;
        for chunks in finished {
            let trail = state.chunked_from_walks(chunks)?;
            for &e in trail.trail.edges() {
                state.finished_edges.insert(e);
                state.used.insert(e);
            }
            state.finished.push(trail);
        }
        if let Some(chunks) = current {
            let trail = state.chunked_from_walks(chunks)?;
            for &e in trail.trail.edges() {
                state.used.insert(e);
            }
            state.current = Some(trail);
        }
        Ok(state)
    }

    fn chunked_from_walks(&self, chunks: &[Vec<NodeId>]) -> Result<ChunkedTrail, ConstructError> {
        let mut out = ChunkedTrail::default();
        for walk in chunks {
            let trail = Trail::from_walk(self.g, walk).map_err(|e| match e {
                crate::error::TrailError::Graph(g) => ConstructError::Graph(g),
                other => ConstructError::Precondition(other.to_string()),
            })?;
            let sides = trail.edges().iter().map(|&e| self.side(e)).collect();
            let chunk = Chunk { trail, sides };
            out.trail = out
                .trail
                .concat(&chunk.trail)
                .map_err(|e| ConstructError::Precondition(e.to_string()))?;
            out.chunks.push(chunk);
        }
        Ok(out)
    }

    pub fn with_triangle_count(mut self, mode: TriangleCount) -> Self {
        self.count_mode = mode;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn apx(&self) -> &EdgeSet {
        &self.apx
    }

    pub fn opt(&self) -> &EdgeSet {
        &self.opt
    }

    /// Number of trails to build, `|opt| - |apx|`.
    pub fn target(&self) -> usize {
        self.q
    }

    pub fn finished(&self) -> &[ChunkedTrail] {
        &self.finished
    }

    pub fn current(&self) -> Option<&ChunkedTrail> {
        self.current.as_ref()
    }

    pub fn used(&self) -> &EdgeSet {
        &self.used
    }

    /// Number of trails, counting the current one.
    fn k(&self) -> usize {
        self.finished.len() + self.current.is_some() as usize
    }

    fn side(&self, e: EdgeId) -> Side {
        if self.apx.contains(e) {
            Side::Apx
        } else {
            Side::Opt
        }
    }

    fn is_free(&self, e: EdgeId) -> bool {
        self.diff.contains(e) && !self.used.contains(e)
    }

    fn in_union(&self, u: NodeId, v: NodeId) -> bool {
        self.g
            .edge_between(u, v)
            .is_some_and(|e| self.union.contains(e))
    }

    /// `|apx \ used|` is below `|opt \ used|` at `u`.
    pub fn is_deficient(&self, u: NodeId, used: &EdgeSet) -> bool {
        let (mut a, mut o) = (0, 0);
        for &(_, e) in self.g.neighbors(u) {
            if used.contains(e) {
                continue;
            }
            a += self.apx.contains(e) as usize;
            o += self.opt.contains(e) as usize;
        }
        a < o
    }

    pub fn deficient_nodes(&self, used: &EdgeSet) -> Vec<NodeId> {
        self.g
            .nodes()
            .filter(|&u| self.is_deficient(u, used))
            .collect()
    }

    fn current_is_closable(&self) -> bool {
        self.current.as_ref().is_some_and(|cur| {
            is_augmenting(self.g, &cur.trail, &self.apx)
                && self.is_deficient(cur.trail.last_node().unwrap(), &self.finished_edges)
        })
    }

    /// All chunks of free edges leaving `start` whose first edge is on `first_side`.
    fn enumerate_chunks(&self, start: NodeId, first_side: Side) -> Vec<Chunk> {
        let g = self.g;
        let mut out = Vec::new();
        for &(a, e1) in g.neighbors(start) {
            if !self.is_free(e1) || self.side(e1) != first_side {
                continue;
            }
            let t1 = Trail::single(g, e1, start).expect("incident edge");
            out.push(Chunk {
                trail: t1.clone(),
                sides: vec![first_side],
            });
            for &(b, e2) in g.neighbors(a) {
                if e2 == e1 || !self.is_free(e2) || self.side(e2) == first_side {
                    continue;
                }
                if !self.in_union(start, b) {
                    continue;
                }
                let mut t2 = t1.clone();
                t2.push(g, e2).expect("incident edge");
                out.push(Chunk {
                    trail: t2.clone(),
                    sides: vec![first_side, first_side.other()],
                });
                for &(c, e3) in g.neighbors(b) {
                    if e3 == e1 || e3 == e2 || !self.is_free(e3) || self.side(e3) != first_side {
                        continue;
                    }
                    if !self.in_union(a, c) {
                        continue;
                    }
                    let mut t3 = t2.clone();
                    t3.push(g, e3).expect("incident edge");
                    out.push(Chunk {
                        trail: t3,
                        sides: vec![first_side, first_side.other(), first_side],
                    });
                }
            }
        }
        out
    }

    /// Checks properties 4 and 5 for a trail `candidate` placed on top of `prior`.
    fn classify(&self, prior: &EdgeSet, candidate: &Trail) -> Result<(), Rejection> {
        let mut flipped = self.apx.clone();
        let mut used = prior.clone();
        for &e in candidate.edges() {
            flipped.toggle(e);
            used.insert(e);
        }
        if !self.g.is_triangle_free(&flipped) {
            return Err(Rejection::ApxTriangle);
        }
        let opt_side = self.opt.symmetric_difference(&used).expect("same owner");
        if !self.g.is_triangle_free(&opt_side) {
            return Err(Rejection::OptTriangle);
        }
        Ok(())
    }

    fn filter(&self, phase: Phase, prior: &EdgeSet, base: &Trail, chunks: Vec<Chunk>) -> Candidates {
        let mut counts = FilterCounts {
            enumerated: chunks.len(),
            ..Default::default()
        };
        let mut kept = Vec::new();
        let mut rejected = Vec::new();
        for chunk in chunks {
            let whole = base.concat(&chunk.trail).expect("chunk continues the trail");
            match self.classify(prior, &whole) {
                Ok(()) => kept.push(chunk),
                Err(reason) => {
                    match reason {
                        Rejection::ApxTriangle => counts.rejected_apx_triangle += 1,
                        Rejection::OptTriangle => counts.rejected_opt_triangle += 1,
                    }
                    rejected.push(RejectedCandidate {
                        walk: chunk.trail.format_walk(),
                        reason,
                    });
                }
            }
        }
        counts.accepted = kept.len();
        kept.sort_by(|a, b| a.edges().cmp(b.edges()));
        Candidates {
            phase,
            kept,
            rejected,
            counts,
        }
    }

    fn first_chunk_filtered(&self) -> Result<Candidates, ConstructError> {
        if self.k() >= self.q {
            return Err(ConstructError::Precondition(format!(
                "{} trails exist and only {} are needed",
                self.k(),
                self.q
            )));
        }
        if self.current.is_some() && !self.current_is_closable() {
            return Err(ConstructError::Precondition(
                "current trail is not augmenting with a deficient last node".into(),
            ));
        }
        // The new trail comes after every existing one, current included.
        let prior = &self.used;
        let mut chunks = Vec::new();
        for u in self.deficient_nodes(prior) {
            chunks.extend(self.enumerate_chunks(u, Side::Opt));
        }
        Ok(self.filter(Phase::FirstChunk, prior, &Trail::empty(), chunks))
    }

    /// Chunks that can start the next trail while keeping the invariant.
    pub fn candidate_first_chunks(&self) -> Result<Vec<Chunk>, ConstructError> {
        let c = self.first_chunk_filtered()?;
        if c.kept.is_empty() {
            return Err(self.no_candidate(Phase::FirstChunk, c.rejected));
        }
        Ok(c.kept)
    }

    fn extension_filtered(&self) -> Result<Candidates, ConstructError> {
        let cur = self
            .current
            .as_ref()
            .filter(|c| !c.trail.is_empty())
            .ok_or_else(|| ConstructError::Precondition("no trail under construction".into()))?;
        if self.current_is_closable() {
            return Err(ConstructError::Precondition(
                "current trail is augmenting and ends at a deficient node".into(),
            ));
        }
        let last_edge = cur.trail.last_edge().unwrap();
        let chunks = self.enumerate_chunks(cur.trail.last_node().unwrap(), self.side(last_edge).other());
        Ok(self.filter(Phase::Extension, &self.finished_edges, &cur.trail, chunks))
    }

    /// Chunks that can extend the current trail while keeping the invariant.
    pub fn candidate_extension_chunks(&self) -> Result<Vec<Chunk>, ConstructError> {
        let c = self.extension_filtered()?;
        if c.kept.is_empty() {
            return Err(self.no_candidate(Phase::Extension, c.rejected));
        }
        Ok(c.kept)
    }

    /// Classified candidates for whichever step comes next, or `None` once
    /// every trail is built.
    pub fn next_candidates(&self) -> Result<Option<Candidates>, ConstructError> {
        if self.is_done() {
            return Ok(None);
        }
        if self.current.is_none() || self.current_is_closable() {
            self.first_chunk_filtered().map(Some)
        } else {
            self.extension_filtered().map(Some)
        }
    }

    /// Triangles of `apx ∪ opt` through `edges` with exactly two edges in `target`.
    fn count_two_edge_triangles(&self, edges: &[EdgeId], target: &EdgeSet) -> usize {
        let mut seen = BTreeSet::new();
        for &e in edges {
            for t in self
                .g
                .triangles_containing_edge(&self.union, e)
                .expect("same owner")
            {
                if t.edge_ids.iter().filter(|&&x| target.contains(x)).count() == 2 {
                    seen.insert(t.nodes);
                }
            }
        }
        seen.len()
    }

    /// Picks one chunk among valid candidates.
    ///
    /// For a fresh trail the smallest edge sequence wins. Otherwise, with
    /// `x u` the last edge and `u y` a candidate's first edge: prefer
    /// candidates where `x y` is in `apx ∪ opt`; failing that, prefer the
    /// fewest triangles of `apx ∪ opt` with two edges on the side opposite
    /// to the last edge; then the smallest edge sequence.
    pub fn apply_tiebreak(&self, candidates: &[Chunk]) -> Result<(Chunk, TieBreakTrace), ConstructError> {
        if candidates.is_empty() {
            return Err(ConstructError::Precondition("no candidates to choose from".into()));
        }
        let smallest = |cs: &[&Chunk]| -> Chunk {
            (*cs.iter().min_by(|a, b| a.edges().cmp(b.edges())).unwrap()).clone()
        };
        let all: Vec<&Chunk> = candidates.iter().collect();
        let cur = match self.current.as_ref().filter(|c| !c.trail.is_empty()) {
            Some(cur) if !self.current_is_closable() => cur,
            _ => {
                return Ok((
                    smallest(&all),
                    TieBreakTrace {
                        rule: TieBreakRule::FreshTrail,
                        candidates: all.len(),
                        kept: all.len(),
                    },
                ))
            }
        };
        if all.len() == 1 {
            return Ok((
                all[0].clone(),
                TieBreakTrace {
                    rule: TieBreakRule::SingleCandidate,
                    candidates: 1,
                    kept: 1,
                },
            ));
        }
        let last_edge = cur.trail.last_edge().unwrap();
        let junction = cur.trail.last_node().unwrap();
        let x = self.g.other_endpoint(last_edge, junction);

        let sharing: Vec<&Chunk> = all
            .iter()
            .copied()
            .filter(|c| {
                let y = self.g.other_endpoint(c.first_edge(), junction);
                self.in_union(x, y)
            })
            .collect();
        if !sharing.is_empty() {
            return Ok((
                smallest(&sharing),
                TieBreakTrace {
                    rule: TieBreakRule::SharesTriangle,
                    candidates: all.len(),
                    kept: sharing.len(),
                },
            ));
        }

        let (target, rule) = match self.side(last_edge) {
            Side::Apx => (&self.opt, TieBreakRule::FewestOptTriangles),
            Side::Opt => (&self.apx, TieBreakRule::FewestApxTriangles),
        };
        let score = |c: &Chunk| match self.count_mode {
            TriangleCount::FirstEdge => self.count_two_edge_triangles(&[c.first_edge()], target),
            TriangleCount::WholeChunk => self.count_two_edge_triangles(c.edges(), target),
        };
        let scores: Vec<usize> = all.iter().map(|c| score(c)).collect();
        let best = *scores.iter().min().unwrap();
        let kept: Vec<&Chunk> = all
            .iter()
            .zip(&scores)
            .filter(|(_, &s)| s == best)
            .map(|(c, _)| *c)
            .collect();
        Ok((
            smallest(&kept),
            TieBreakTrace {
                rule,
                candidates: all.len(),
                kept: kept.len(),
            },
        ))
    }

    fn no_candidate(&self, phase: Phase, rejected: Vec<RejectedCandidate>) -> ConstructError {
        let mut dump = self.dump();
        dump.rejected = rejected;
        ConstructError::NoCandidate {
            phase,
            dump: Box::new(dump),
        }
    }

    pub fn dump(&self) -> StateDump {
        let walks = |t: &ChunkedTrail| t.chunks.iter().map(|c| c.trail.format_walk()).collect();
        StateDump {
            node_count: self.g.node_count(),
            edges: self.g.edges().to_vec(),
            apx: self.apx.to_vec(),
            opt: self.opt.to_vec(),
            finished: self.finished.iter().map(walks).collect(),
            current: self.current.as_ref().map(walks),
            rejected: Vec::new(),
        }
    }

    /// Trails in order, the current one last.
    fn trails(&self) -> impl Iterator<Item = &ChunkedTrail> {
        self.finished.iter().chain(self.current.as_ref())
    }

    fn is_chunk(&self, c: &Chunk) -> bool {
        let t = &c.trail;
        (1..=3).contains(&t.len())
            && t.edges().iter().all(|&e| self.diff.contains(e))
            && is_alternating(t, &self.apx)
            && t.walk().windows(3).all(|w| self.in_union(w[0], w[2]))
    }

    /// Every violated property of the construction invariant.
    pub fn check_invariant(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut prior = self.g.empty_set();
        for (j, t) in self.trails().enumerate() {
            for (i, c) in t.chunks.iter().enumerate() {
                if !self.is_chunk(c) {
                    out.push(Diagnostic::NotAChunk { trail_index: j, chunk_index: i });
                }
            }
            if !is_alternating(&t.trail, &self.apx) {
                out.push(Diagnostic::NotAlternating { trail_index: j });
            }
            for &e in t.trail.edges() {
                if !self.diff.contains(e) {
                    out.push(Diagnostic::EdgeOutsideDifference { trail_index: j, edge: e });
                }
                if prior.contains(e) {
                    out.push(Diagnostic::EdgeReused { trail_index: j, edge: e });
                }
            }
            let first = t.trail.first_node();
            if let Some(first) = first {
                if !self.is_deficient(first, &prior) {
                    out.push(Diagnostic::EndNodeNotDeficient { trail_index: j, node: first });
                }
            }
            if j < self.finished.len() {
                if !is_augmenting(self.g, &t.trail, &self.apx) {
                    out.push(Diagnostic::NotAugmenting { trail_index: j });
                }
                if let Some(last) = t.trail.last_node() {
                    if !self.is_deficient(last, &prior) {
                        out.push(Diagnostic::EndNodeNotDeficient { trail_index: j, node: last });
                    }
                }
            } else if t.trail.first_edge().is_some_and(|e| self.side(e) != Side::Opt) {
                out.push(Diagnostic::FirstEdgeNotOpt { trail_index: j });
            }

            let mut flipped = self.apx.clone();
            for &e in t.trail.edges() {
                flipped.toggle(e);
                prior.insert(e);
            }
            for tri in self.g.list_triangles(&flipped).expect("same owner") {
                out.push(Diagnostic::ApxTriangle { trail_index: j, nodes: tri.nodes });
            }
            let opt_side = self.opt.symmetric_difference(&prior).expect("same owner");
            for tri in self.g.list_triangles(&opt_side).expect("same owner") {
                out.push(Diagnostic::OptTriangle { trail_index: j, nodes: tri.nodes });
            }
        }
        out
    }

    /// Degree and triangle-multiplicity bounds that the parity argument
    /// guarantees. Finished trails are bounded at every node; the current
    /// trail everywhere except its last node.
    pub fn assert_parity_and_uniqueness(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut prior = self.g.empty_set();
        for (j, t) in self.trails().enumerate() {
            let mut flipped = self.apx.clone();
            for &e in t.trail.edges() {
                flipped.toggle(e);
                prior.insert(e);
            }
            let opt_side = self.opt.symmetric_difference(&prior).expect("same owner");
            let is_current = j == self.finished.len();
            let exempt = if is_current { t.trail.last_node() } else { None };
            for u in self.g.nodes() {
                if Some(u) == exempt {
                    continue;
                }
                let d = self.g.degree_in_unchecked(u, &flipped);
                if d > 2 {
                    out.push(Diagnostic::ApxDegree { trail_index: j, node: u, degree: d });
                }
                let d = self.g.degree_in_unchecked(u, &opt_side);
                if d > 2 {
                    out.push(Diagnostic::OptDegree { trail_index: j, node: u, degree: d });
                }
            }
            if is_current {
                for &e in t.trail.edges() {
                    for (set, side) in [(&flipped, Side::Apx), (&opt_side, Side::Opt)] {
                        let count = self
                            .g
                            .triangles_containing_edge(set, e)
                            .expect("same owner")
                            .len();
                        if count > 1 {
                            out.push(Diagnostic::TriangleMultiplicity { edge: e, side, count });
                        }
                    }
                }
            }
        }
        out
    }

    /// Nodes deficient w.r.t. the finished trails that are not deficient outright.
    pub fn check_deficiency_persistence(&self) -> Vec<Diagnostic> {
        let none = self.g.empty_set();
        self.deficient_nodes(&self.finished_edges)
            .into_iter()
            .filter(|&u| !self.is_deficient(u, &none))
            .map(|node| Diagnostic::DeficiencyLost { node })
            .collect()
    }

    fn commit_current(&mut self) {
        let cur = self.current.take().expect("current trail");
        for &e in cur.trail.edges() {
            self.finished_edges.insert(e);
        }
        self.finished.push(cur);
    }

    fn add_chunk(&mut self, chunk: Chunk) {
        for &e in chunk.edges() {
            self.used.insert(e);
        }
        self.current.get_or_insert_with(ChunkedTrail::default).push(chunk);
    }

    fn verify(&self, with_persistence: bool) -> Result<(), ConstructError> {
        let mut diagnostics = self.check_invariant();
        diagnostics.extend(self.assert_parity_and_uniqueness());
        if with_persistence {
            diagnostics.extend(self.check_deficiency_persistence());
        }
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(ConstructError::InvariantBroken {
                diagnostics,
                dump: Box::new(self.dump()),
            })
        }
    }

    fn is_done(&self) -> bool {
        if self.q == 0 {
            return true;
        }
        self.current.as_ref().is_some_and(|cur| {
            self.finished.len() + 1 == self.q && is_augmenting(self.g, &cur.trail, &self.apx)
        })
    }

    /// Adds one chunk: starts a new trail or extends the current one.
    /// Returns `None` once all trails are built.
    pub fn step(&mut self) -> Result<Option<TraceRecord>, ConstructError> {
        if self.is_done() {
            return Ok(None);
        }
        let fresh = self.current.is_none() || self.current_is_closable();
        let deficient_nodes_before = self.deficient_nodes(&self.used_before_next(fresh));
        let Some(candidates) = self.next_candidates()? else {
            return Ok(None);
        };
        if candidates.kept.is_empty() {
            return Err(self.no_candidate(candidates.phase, candidates.rejected));
        }
        let counts = candidates.counts;
        let (chunk, tiebreak) = self.apply_tiebreak(&candidates.kept)?;
        if fresh && self.current.is_some() {
            self.commit_current();
            self.verify(true)?;
        }
        let record = TraceRecord {
            trail_index: self.finished.len(),
            chunk_edges: chunk.edges().to_vec(),
            chunk_walk: chunk.trail.format_walk(),
            filter_counts: counts,
            tiebreak,
            deficient_nodes_before,
        };
        self.add_chunk(chunk);
        self.verify(fresh)?;
        Ok(Some(record))
    }

    /// Edges before the trail that the next chunk belongs to.
    fn used_before_next(&self, fresh: bool) -> EdgeSet {
        if fresh {
            self.used.clone()
        } else {
            self.finished_edges.clone()
        }
    }

    /// All trails built so far, in order.
    pub fn trail_list(&self) -> Vec<Trail> {
        self.trails().map(|t| t.trail.clone()).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConstructOptions {
    pub triangle_count: TriangleCount,
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub trails: Vec<Trail>,
    pub chunked: Vec<ChunkedTrail>,
    pub trace: Vec<TraceRecord>,
}

/// Builds `|opt| - |apx|` edge-disjoint trails in `apx △ opt`, each
/// augmenting for `apx`. Requires `opt` to dominate `apx` in degree.
pub fn construct_trails(g: &Graph, apx: &EdgeSet, opt: &EdgeSet) -> Result<Vec<Trail>, ConstructError> {
    Ok(construct_trails_with(g, apx, opt, &ConstructOptions::default())?.trails)
}

pub fn construct_trails_with(
    g: &Graph,
    apx: &EdgeSet,
    opt: &EdgeSet,
    options: &ConstructOptions,
) -> Result<Construction, ConstructError> {
    validate_inputs(g, apx, opt)?;
    if opt.len() < apx.len() {
        return Err(ConstructError::Precondition(format!(
            "|opt| = {} is smaller than |apx| = {}",
            opt.len(),
            apx.len()
        )));
    }
    if !degree_dominates(g, apx, opt) {
        return Err(ConstructError::Precondition(
            "opt does not dominate apx in degree".into(),
        ));
    }
    let mut state = ConstructionState::new(g, apx, opt)?.with_triangle_count(options.triangle_count);
    let budget = state.diff.len();
    let mut trace = Vec::new();
    while let Some(record) = state.step()? {
        trace.push(record);
        if trace.len() > budget {
            return Err(ConstructError::Postcondition(format!(
                "more than {budget} steps"
            )));
        }
    }
    let chunked: Vec<ChunkedTrail> = state.trails().cloned().collect();
    let trails: Vec<Trail> = chunked.iter().map(|t| t.trail.clone()).collect();
    check_trail_family(g, apx, opt, &trails).map_err(ConstructError::Postcondition)?;
    Ok(Construction {
        trails,
        chunked,
        trace,
    })
}

/// `trails` has `|opt| - |apx|` members, pairwise edge-disjoint, all inside
/// `apx △ opt`, each augmenting for `apx` on its own.
pub fn check_trail_family(g: &Graph, apx: &EdgeSet, opt: &EdgeSet, trails: &[Trail]) -> Result<(), String> {
    let q = opt.len().saturating_sub(apx.len());
    if trails.len() != q {
        return Err(format!("expected {q} trails, got {}", trails.len()));
    }
    let diff = apx.symmetric_difference(opt).map_err(|e| e.to_string())?;
    let mut seen = g.empty_set();
    for (j, t) in trails.iter().enumerate() {
        for &e in t.edges() {
            if !diff.contains(e) {
                return Err(format!("trail {j} uses edge {e} outside apx △ opt"));
            }
            if !seen.insert(e) {
                return Err(format!("edge {e} shared by two trails"));
            }
        }
        if !is_augmenting(g, t, apx) {
            return Err(format!("trail {j} ({t}) is not augmenting"));
        }
    }
    Ok(())
}

/// Graphviz rendering of `apx ∪ opt`: red for `apx \ opt`, blue for
/// `opt \ apx`, a double red/blue line for shared edges, and trail labels.
pub fn to_dot(g: &Graph, apx: &EdgeSet, opt: &EdgeSet, trails: &[Trail]) -> String {
    let mut label = vec![None; g.edge_count()];
    for (j, t) in trails.iter().enumerate() {
        for (i, &e) in t.edges().iter().enumerate() {
            label[e] = Some(format!("P{}.{}", j + 1, i + 1));
        }
    }
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for u in g.nodes() {
        out.push_str(&format!("  {u};\n"));
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let color = match (apx.contains(e), opt.contains(e)) {
            (true, false) => "red",
            (false, true) => "blue",
            (true, true) => "red:blue",
            (false, false) => continue,
        };
        let mut attrs = vec![format!("color=\"{color}\"")];
        if let Some(l) = &label[e] {
            attrs.push(format!("label=\"{l}\""));
            attrs.push("penwidth=2".into());
        }
        out.push_str(&format!("  {u} -- {v} [{}];\n", attrs.join(", ")));
    }
    out.push_str("}\n");
    out
}
