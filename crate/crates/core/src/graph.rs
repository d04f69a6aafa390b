//! Simple undirected graphs with stable edge ids, edge sets over them, and
//! the feasibility predicates for triangle-free 2-matchings.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use serde::Serialize;

use crate::error::GraphError;

pub type NodeId = usize;
pub type EdgeId = usize;

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

/// An immutable simple undirected graph.
///
/// Edge ids are dense (`0..m`) and follow insertion order. Every edge is
/// recorded in the adjacency lists of both endpoints, sorted by neighbor.
#[derive(Clone, Debug)]
pub struct Graph {
    id: u64,
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    adjacency: Vec<Vec<(NodeId, EdgeId)>>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.node_count == other.node_count && self.edges == other.edges
    }
}

impl Eq for Graph {}

fn key(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    /// Builds a graph from an edge list. Endpoints are stored as given.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new(node_count);
        for (u, v) in edges {
            builder.add_edge(u, v)?;
        }
        Ok(builder.build())
    }

    pub fn empty(node_count: usize) -> Self {
        GraphBuilder::new(node_count).build()
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> std::ops::Range<NodeId> {
        0..self.node_count
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn endpoints(&self, e: EdgeId) -> (NodeId, NodeId) {
        self.edges[e]
    }

    pub fn contains_edge_id(&self, e: EdgeId) -> bool {
        e < self.edges.len()
    }

    /// The endpoint of `e` that is not `u`. `u` must be an endpoint of `e`.
    pub fn other_endpoint(&self, e: EdgeId, u: NodeId) -> NodeId {
        let (a, b) = self.edges[e];
        debug_assert!(a == u || b == u, "node {u} is not an endpoint of edge {e}");
        if a == u {
            b
        } else {
            a
        }
    }

    pub fn edge_between(&self, u: NodeId, v: NodeId) -> Option<EdgeId> {
        self.index.get(&key(u, v)).copied()
    }

    /// Neighbors of `u` with the connecting edge id, ascending by neighbor.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, EdgeId)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adjacency[u].len()
    }

    pub fn empty_set(&self) -> EdgeSet {
        EdgeSet::new(self)
    }

    pub fn full_set(&self) -> EdgeSet {
        let mut s = EdgeSet::new(self);
        for e in 0..self.edge_count() {
            s.insert(e);
        }
        s
    }

    /// Edge set from ids. Unknown ids are rejected.
    pub fn edge_set(&self, ids: impl IntoIterator<Item = EdgeId>) -> Result<EdgeSet, GraphError> {
        let mut s = EdgeSet::new(self);
        for e in ids {
            if !self.contains_edge_id(e) {
                return Err(GraphError::UnknownEdge(e));
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// Edge set from node pairs. Pairs that are not edges are rejected.
    pub fn edge_set_from_pairs(
        &self,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<EdgeSet, GraphError> {
        let mut s = EdgeSet::new(self);
        for (u, v) in pairs {
            let e = self
                .edge_between(u, v)
                .ok_or(GraphError::NotAnEdge(u, v))?;
            s.insert(e);
        }
        Ok(s)
    }

    fn check_owner(&self, s: &EdgeSet) -> Result<(), GraphError> {
        if s.owner != self.id {
            Err(GraphError::OwnerMismatch)
        } else {
            Ok(())
        }
    }

    fn assert_owner(&self, s: &EdgeSet) {
        assert!(s.owner == self.id, "edge set is not owned by this graph");
    }

    /// Number of edges of `s` incident to `u`.
    pub fn degree_in(&self, u: NodeId, s: &EdgeSet) -> Result<usize, GraphError> {
        self.check_owner(s)?;
        if u >= self.node_count {
            return Err(GraphError::NodeOutOfRange {
                node: u,
                node_count: self.node_count,
            });
        }
        Ok(self.degree_in_unchecked(u, s))
    }

    pub(crate) fn degree_in_unchecked(&self, u: NodeId, s: &EdgeSet) -> usize {
        self.adjacency[u]
            .iter()
            .filter(|&&(_, e)| s.contains(e))
            .count()
    }

    /// All triangles whose three edges lie in `s`, sorted by node triple.
    pub fn list_triangles(&self, s: &EdgeSet) -> Result<Vec<Triangle>, GraphError> {
        self.check_owner(s)?;
        let mut out = Vec::new();
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if !s.contains(e) {
                continue;
            }
            let (a, b) = key(u, v);
            // Report each triangle once, from its edge between the two smallest nodes.
            for (c, _) in self.common_neighbors_in(a, b, s) {
                if c > b {
                    out.push(Triangle::new(self, a, b, c));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// Triangles of `s` that contain edge `e`. Empty when `e` is not in `s`.
    pub fn triangles_containing_edge(
        &self,
        s: &EdgeSet,
        e: EdgeId,
    ) -> Result<Vec<Triangle>, GraphError> {
        self.check_owner(s)?;
        if !self.contains_edge_id(e) {
            return Err(GraphError::UnknownEdge(e));
        }
        if !s.contains(e) {
            return Ok(Vec::new());
        }
        let (u, v) = self.edges[e];
        let mut out: Vec<Triangle> = self
            .common_neighbors_in(u, v, s)
            .map(|(w, _)| Triangle::new(self, u, v, w))
            .collect();
        out.sort();
        Ok(out)
    }

    /// Nodes `w` with both `uw` and `vw` in `s`, with the edge ids `(uw, vw)`.
    pub(crate) fn common_neighbors_in<'a>(
        &'a self,
        u: NodeId,
        v: NodeId,
        s: &'a EdgeSet,
    ) -> impl Iterator<Item = (NodeId, (EdgeId, EdgeId))> + 'a {
        self.adjacency[u].iter().filter_map(move |&(w, uw)| {
            if w == v || !s.contains(uw) {
                return None;
            }
            let vw = self.edge_between(v, w)?;
            s.contains(vw).then_some((w, (uw, vw)))
        })
    }

    pub fn is_two_matching(&self, m: &EdgeSet) -> bool {
        self.assert_owner(m);
        self.nodes().all(|u| self.degree_in_unchecked(u, m) <= 2)
    }

    pub fn is_triangle_free(&self, m: &EdgeSet) -> bool {
        self.assert_owner(m);
        m.iter().all(|e| {
            let (u, v) = self.edges[e];
            self.common_neighbors_in(u, v, m).next().is_none()
        })
    }

    pub fn is_feasible(&self, m: &EdgeSet) -> bool {
        self.is_two_matching(m) && self.is_triangle_free(m)
    }

    /// First reason `m` is not a triangle-free 2-matching, if any.
    pub fn feasibility_violation(&self, m: &EdgeSet) -> Option<Violation> {
        self.assert_owner(m);
        for u in self.nodes() {
            let d = self.degree_in_unchecked(u, m);
            if d > 2 {
                return Some(Violation::Degree { node: u, degree: d });
            }
        }
        self.list_triangles(m)
            .expect("owner checked")
            .into_iter()
            .next()
            .map(|t| Violation::Triangle { nodes: t.nodes })
    }
}

/// Incremental graph construction with simplicity checks.
#[derive(Debug)]
pub struct GraphBuilder {
    node_count: usize,
    edges: Vec<(NodeId, NodeId)>,
    index: HashMap<(NodeId, NodeId), EdgeId>,
}

impl GraphBuilder {
    pub fn new(node_count: usize) -> Self {
        Self {
            node_count,
            edges: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn add_edge(&mut self, u: NodeId, v: NodeId) -> Result<EdgeId, GraphError> {
        for w in [u, v] {
            if w >= self.node_count {
                return Err(GraphError::NodeOutOfRange {
                    node: w,
                    node_count: self.node_count,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let id = self.edges.len();
        if self.index.insert(key(u, v), id).is_some() {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.edges.push((u, v));
        Ok(id)
    }

    pub fn build(self) -> Graph {
        let mut adjacency = vec![Vec::new(); self.node_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adjacency[u].push((v, e));
            adjacency[v].push((u, e));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            id: NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed),
            node_count: self.node_count,
            edges: self.edges,
            adjacency,
            index: self.index,
        }
    }
}

/// A set of edge ids of one particular graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    owner: u64,
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl PartialOrd for EdgeSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sets compare as their ascending id sequences.
impl Ord for EdgeSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl EdgeSet {
    pub fn new(g: &Graph) -> Self {
        Self {
            owner: g.id,
            len: 0,
            words: vec![0; g.edge_count().div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_owned_by(&self, g: &Graph) -> bool {
        self.owner == g.id
    }

    pub fn same_owner(&self, other: &EdgeSet) -> bool {
        self.owner == other.owner
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        self.words
            .get(e / 64)
            .is_some_and(|w| w & (1 << (e % 64)) != 0)
    }

    /// Inserts `e`; returns whether it was newly added. Panics on ids outside the owner graph.
    pub fn insert(&mut self, e: EdgeId) -> bool {
        let word = &mut self.words[e / 64];
        let bit = 1 << (e % 64);
        let fresh = *word & bit == 0;
        *word |= bit;
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, e: EdgeId) -> bool {
        let word = &mut self.words[e / 64];
        let bit = 1 << (e % 64);
        let present = *word & bit != 0;
        *word &= !bit;
        self.len -= present as usize;
        present
    }

    /// Flips membership of `e`; returns whether it is now present.
    pub fn toggle(&mut self, e: EdgeId) -> bool {
        if self.contains(e) {
            self.remove(e);
            false
        } else {
            self.insert(e);
            true
        }
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let t = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<EdgeId> {
        self.iter().collect()
    }

    fn combine(&self, other: &EdgeSet, op: impl Fn(u64, u64) -> u64) -> Result<EdgeSet, GraphError> {
        if self.owner != other.owner {
            return Err(GraphError::OwnerMismatch);
        }
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| op(a, b))
            .collect();
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Ok(EdgeSet {
            owner: self.owner,
            len,
            words,
        })
    }

    pub fn union(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.combine(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.combine(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.combine(other, |a, b| a & !b)
    }

    pub fn symmetric_difference(&self, other: &EdgeSet) -> Result<EdgeSet, GraphError> {
        self.combine(other, |a, b| a ^ b)
    }

    pub fn is_subset(&self, other: &EdgeSet) -> Result<bool, GraphError> {
        Ok(self.difference(other)?.is_empty())
    }

    pub fn is_disjoint(&self, other: &EdgeSet) -> Result<bool, GraphError> {
        Ok(self.intersection(other)?.is_empty())
    }
}

/// A triangle `abc` with `a < b < c` and the ids of `ab`, `bc`, `ca`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triangle {
    pub nodes: [NodeId; 3],
    pub edge_ids: [EdgeId; 3],
}

impl Triangle {
    fn new(g: &Graph, u: NodeId, v: NodeId, w: NodeId) -> Self {
        let mut nodes = [u, v, w];
        nodes.sort_unstable();
        let [a, b, c] = nodes;
        let edge = |x, y| g.edge_between(x, y).expect("triangle edge exists");
        Triangle {
            nodes,
            edge_ids: [edge(a, b), edge(b, c), edge(c, a)],
        }
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edge_ids.contains(&e)
    }
}

/// Why an edge set fails to be a triangle-free 2-matching.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Violation {
    Degree { node: NodeId, degree: usize },
    Triangle { nodes: [NodeId; 3] },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Degree { node, degree } => write!(f, "node {node} has degree {degree}"),
            Violation::Triangle { nodes: [a, b, c] } => write!(f, "triangle ({a},{b},{c})"),
        }
    }
}
