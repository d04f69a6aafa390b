//! Trails: walks with pairwise distinct edges, possibly closed, with
//! alternation, augmentation and flipping relative to an edge set.

use std::fmt;

use serde::Serialize;

use crate::error::{GraphError, ParseError, ParseErrorKind, TrailError};
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};

/// A sequence of distinct edges together with the node walk that traverses
/// them. The walk has one more node than there are edges; an empty trail has
/// an empty walk.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Trail {
    edges: Vec<EdgeId>,
    walk: Vec<NodeId>,
}

impl Trail {
    pub fn empty() -> Self {
        Self::default()
    }

    /// One-edge trail oriented to start at `first`.
    pub fn single(g: &Graph, e: EdgeId, first: NodeId) -> Result<Self, TrailError> {
        if !g.contains_edge_id(e) {
            return Err(GraphError::UnknownEdge(e).into());
        }
        let (u, v) = g.endpoints(e);
        let second = if first == u {
            v
        } else if first == v {
            u
        } else {
            return Err(TrailError::NotIncident { node: first, edge: e });
        };
        Ok(Self {
            edges: vec![e],
            walk: vec![first, second],
        })
    }

    /// Trail through consecutive walk nodes. Fewer than two nodes give the empty trail.
    pub fn from_walk(g: &Graph, walk: &[NodeId]) -> Result<Self, TrailError> {
        let mut t = Trail::empty();
        if walk.len() < 2 {
            return Ok(t);
        }
        for pair in walk.windows(2) {
            let (u, v) = (pair[0], pair[1]);
            for w in [u, v] {
                if w >= g.node_count() {
                    return Err(GraphError::NodeOutOfRange {
                        node: w,
                        node_count: g.node_count(),
                    }
                    .into());
                }
            }
            let e = g.edge_between(u, v).ok_or(GraphError::NotAnEdge(u, v))?;
            if t.is_empty() {
                t = Trail::single(g, e, u)?;
            } else {
                t.push(g, e)?;
            }
        }
        Ok(t)
    }

    /// Appends `e` at the last node.
    pub fn push(&mut self, g: &Graph, e: EdgeId) -> Result<(), TrailError> {
        let last = *self.walk.last().expect("push on an empty trail; use Trail::single");
        if !g.contains_edge_id(e) {
            return Err(GraphError::UnknownEdge(e).into());
        }
        if self.edges.contains(&e) {
            return Err(TrailError::EdgeReuse(e));
        }
        let (u, v) = g.endpoints(e);
        let next = if u == last {
            v
        } else if v == last {
            u
        } else {
            return Err(TrailError::NotIncident { node: last, edge: e });
        };
        self.edges.push(e);
        self.walk.push(next);
        Ok(())
    }

    /// Removes the last edge. Removing the only edge leaves the empty trail.
    pub fn pop_last(&mut self) {
        self.edges.pop();
        self.walk.pop();
        if self.edges.is_empty() {
            self.walk.clear();
        }
    }

    /// `self` followed by `other`. The last node of `self` must be the first of `other`.
    pub fn concat(&self, other: &Trail) -> Result<Trail, TrailError> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        let (last, first) = (self.last_node().unwrap(), other.first_node().unwrap());
        if last != first {
            return Err(TrailError::EndpointMismatch { last, first });
        }
        if let Some(&e) = other.edges.iter().find(|e| self.edges.contains(e)) {
            return Err(TrailError::EdgeReuse(e));
        }
        let mut out = self.clone();
        out.edges.extend_from_slice(&other.edges);
        out.walk.extend_from_slice(&other.walk[1..]);
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn walk(&self) -> &[NodeId] {
        &self.walk
    }

    pub fn first_node(&self) -> Option<NodeId> {
        self.walk.first().copied()
    }

    pub fn last_node(&self) -> Option<NodeId> {
        self.walk.last().copied()
    }

    pub fn first_edge(&self) -> Option<EdgeId> {
        self.edges.first().copied()
    }

    pub fn last_edge(&self) -> Option<EdgeId> {
        self.edges.last().copied()
    }

    pub fn is_closed(&self) -> bool {
        !self.is_empty() && self.first_node() == self.last_node()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    pub fn edge_set(&self, g: &Graph) -> Result<EdgeSet, GraphError> {
        g.edge_set(self.edges.iter().copied())
    }

    /// Walk nodes joined by `-`, e.g. `2-0-1-2`. Empty trails render as an empty string.
    pub fn format_walk(&self) -> String {
        self.walk
            .iter()
            .map(|u| u.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

impl fmt::Display for Trail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_walk())
    }
}

/// Parses the `u-v-w` walk format against `g`. The empty string is the empty trail.
pub fn parse_walk(g: &Graph, text: &str) -> Result<Trail, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Trail::empty());
    }
    let nodes: Vec<NodeId> = text
        .split('-')
        .map(|t| t.trim().parse::<NodeId>())
        .collect::<Result<_, _>>()
        .map_err(|_| ParseError::new(1, ParseErrorKind::MalformedWalk))?;
    if nodes.len() < 2 {
        return Err(ParseError::new(1, ParseErrorKind::MalformedWalk));
    }
    Trail::from_walk(g, &nodes).map_err(|e| ParseError::new(1, e))
}

/// No two consecutive edges of `p` are both inside or both outside `m`.
pub fn is_alternating(p: &Trail, m: &EdgeSet) -> bool {
    p.edges
        .windows(2)
        .all(|w| m.contains(w[0]) != m.contains(w[1]))
}

/// Flipping `p` turns `m` into a triangle-free 2-matching with one more edge.
pub fn is_augmenting(g: &Graph, p: &Trail, m: &EdgeSet) -> bool {
    if p.is_empty() || !is_alternating(p, m) {
        return false;
    }
    match apply_trail(g, m, p) {
        Ok(flipped) => flipped.len() == m.len() + 1 && g.is_feasible(&flipped),
        Err(_) => false,
    }
}

/// `m` with the membership of every edge of `p` flipped.
pub fn apply_trail(g: &Graph, m: &EdgeSet, p: &Trail) -> Result<EdgeSet, GraphError> {
    if !m.is_owned_by(g) {
        return Err(GraphError::OwnerMismatch);
    }
    let mut out = m.clone();
    for &e in p.edges() {
        if !g.contains_edge_id(e) {
            return Err(GraphError::UnknownEdge(e));
        }
        out.toggle(e);
    }
    Ok(out)
}
