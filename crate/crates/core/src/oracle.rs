//! Exact maximum triangle-free 2-matchings by branch and bound, for small
//! graphs only.
//!
//! Every search runs in two passes. The first finds the optimal objective
//! value; the second walks edges in ascending id order, trying inclusion
//! before exclusion, and stops at the first set reaching that value. That
//! set is the lexicographically smallest optimum (as a sorted id sequence).

use crate::error::OracleError;
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};

/// Largest edge count accepted by [`exact_max`] and [`exact_max_tiebreak`].
pub const EXACT_EDGE_LIMIT: usize = 45;
/// Largest edge count accepted by [`enumerate_maximum`].
pub const ENUMERATE_EDGE_LIMIT: usize = 20;

fn guard(g: &Graph, limit: usize) -> Result<(), OracleError> {
    if g.edge_count() > limit {
        Err(OracleError::GuardExceeded {
            edges: g.edge_count(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// Objective: cardinality first, then overlap with a reference set.
type Score = (usize, usize);

enum Mode {
    /// Find the best score; only strict improvements count.
    Optimize,
    /// Stop at the first set with exactly this score.
    First(Score),
    /// Collect every set with exactly this score.
    All(Score),
}

struct BranchAndBound<'a> {
    g: &'a Graph,
    order: Vec<EdgeId>,
    reference: Option<&'a EdgeSet>,
    chosen: EdgeSet,
    degree: Vec<usize>,
    /// Edges not yet decided, per node.
    open_incident: Vec<usize>,
    overlap: usize,
    /// Reference edges among the undecided suffix of `order`.
    open_reference: Vec<usize>,
    best: Score,
    best_set: Option<EdgeSet>,
    collected: Vec<EdgeSet>,
    mode: Mode,
}

impl<'a> BranchAndBound<'a> {
    fn new(g: &'a Graph, order: Vec<EdgeId>, reference: Option<&'a EdgeSet>, mode: Mode) -> Self {
        let mut open_reference = vec![0; order.len() + 1];
        for i in (0..order.len()).rev() {
            let hit = reference.is_some_and(|r| r.contains(order[i]));
            open_reference[i] = open_reference[i + 1] + hit as usize;
        }
        Self {
            g,
            reference,
            chosen: g.empty_set(),
            degree: vec![0; g.node_count()],
            open_incident: g.nodes().map(|u| g.degree(u)).collect(),
            overlap: 0,
            open_reference,
            best: (0, 0),
            best_set: None,
            collected: Vec::new(),
            order,
            mode,
        }
    }

    fn size_bound(&self, i: usize) -> usize {
        let remaining = self.order.len() - i;
        let capacity: usize = self
            .g
            .nodes()
            .map(|u| (2 - self.degree[u]).min(self.open_incident[u]))
            .sum();
        self.chosen.len() + remaining.min(capacity / 2)
    }

    fn can_take(&self, u: NodeId, v: NodeId) -> bool {
        self.degree[u] < 2
            && self.degree[v] < 2
            && self.g.common_neighbors_in(u, v, &self.chosen).next().is_none()
    }

    fn pruned(&self, i: usize) -> bool {
        let bound = (self.size_bound(i), self.overlap + self.open_reference[i]);
        match self.mode {
            Mode::Optimize => self.best_set.is_some() && bound <= self.best,
            Mode::First(target) | Mode::All(target) => {
                bound.0 < target.0 || (bound.0 == target.0 && bound.1 < target.1)
            }
        }
    }

    /// Returns true to stop the whole search.
    fn run(&mut self, i: usize) -> bool {
        if self.pruned(i) {
            return false;
        }
        if i == self.order.len() {
            let score = (self.chosen.len(), self.overlap);
            match self.mode {
                Mode::Optimize => {
                    if self.best_set.is_none() || score > self.best {
                        self.best = score;
                        self.best_set = Some(self.chosen.clone());
                    }
                }
                Mode::First(target) => {
                    if score == target {
                        self.best_set = Some(self.chosen.clone());
                        return true;
                    }
                }
                Mode::All(target) => {
                    if score == target {
                        self.collected.push(self.chosen.clone());
                    }
                }
            }
            return false;
        }
        let e = self.order[i];
        let (u, v) = self.g.endpoints(e);
        self.open_incident[u] -= 1;
        self.open_incident[v] -= 1;
        let mut stop = false;
        if self.can_take(u, v) {
            let hit = self.reference.is_some_and(|r| r.contains(e)) as usize;
            self.chosen.insert(e);
            self.degree[u] += 1;
            self.degree[v] += 1;
            self.overlap += hit;
            stop = self.run(i + 1);
            self.overlap -= hit;
            self.degree[u] -= 1;
            self.degree[v] -= 1;
            self.chosen.remove(e);
        }
        if !stop {
            stop = self.run(i + 1);
        }
        self.open_incident[u] += 1;
        self.open_incident[v] += 1;
        stop
    }
}

/// Best achievable score. Reference edges are tried first so that good
/// incumbents appear early.
fn optimum_score(g: &Graph, reference: Option<&EdgeSet>) -> Score {
    let mut order: Vec<EdgeId> = (0..g.edge_count()).collect();
    if let Some(r) = reference {
        order.sort_by_key(|&e| !r.contains(e));
    }
    let mut bb = BranchAndBound::new(g, order, reference, Mode::Optimize);
    bb.run(0);
    bb.best
}

fn first_with_score(g: &Graph, reference: Option<&EdgeSet>, score: Score) -> EdgeSet {
    let mut bb = BranchAndBound::new(g, (0..g.edge_count()).collect(), reference, Mode::First(score));
    bb.run(0);
    bb.best_set.expect("optimal score is attainable")
}

/// A maximum triangle-free 2-matching: the lexicographically smallest one.
pub fn exact_max(g: &Graph) -> Result<EdgeSet, OracleError> {
    guard(g, EXACT_EDGE_LIMIT)?;
    let score = optimum_score(g, None);
    Ok(first_with_score(g, None, score))
}

/// Among the maximum triangle-free 2-matchings, one sharing the most edges
/// with `apx`; the lexicographically smallest such set.
pub fn exact_max_tiebreak(g: &Graph, apx: &EdgeSet) -> Result<EdgeSet, OracleError> {
    guard(g, EXACT_EDGE_LIMIT)?;
    if !apx.is_owned_by(g) {
        return Err(crate::error::GraphError::OwnerMismatch.into());
    }
    if !g.is_feasible(apx) {
        return Err(OracleError::InfeasibleReference);
    }
    let score = optimum_score(g, Some(apx));
    Ok(first_with_score(g, Some(apx), score))
}

/// Every maximum triangle-free 2-matching, in ascending order.
pub fn enumerate_maximum(g: &Graph) -> Result<Vec<EdgeSet>, OracleError> {
    guard(g, ENUMERATE_EDGE_LIMIT)?;
    let score = optimum_score(g, None);
    let mut bb = BranchAndBound::new(g, (0..g.edge_count()).collect(), None, Mode::All(score));
    bb.run(0);
    let mut all = bb.collected;
    all.sort();
    Ok(all)
}
