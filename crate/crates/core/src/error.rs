use thiserror::Error;

use crate::graph::{EdgeId, NodeId};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range (graph has {node_count} nodes)")]
    NodeOutOfRange { node: NodeId, node_count: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("{0} {1} is not an edge of the graph")]
    NotAnEdge(NodeId, NodeId),
    #[error("edge sets belong to different graphs")]
    OwnerMismatch,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("missing header line \"n m\"")]
    MissingHeader,
    #[error("malformed header, expected \"n m\"")]
    MalformedHeader,
    #[error("node count {0} exceeds the supported maximum")]
    TooManyNodes(usize),
    #[error("malformed edge line, expected \"u v\"")]
    MalformedEdge,
    #[error("expected {expected} edge lines, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("malformed trail walk")]
    MalformedWalk,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Trail(#[from] TrailError),
}

impl ParseError {
    pub fn new(line: usize, kind: impl Into<ParseErrorKind>) -> Self {
        Self {
            line,
            kind: kind.into(),
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TrailError {
    #[error("trail ends at node {last} but the next part starts at node {first}")]
    EndpointMismatch { last: NodeId, first: NodeId },
    #[error("edge {0} used twice")]
    EdgeReuse(EdgeId),
    #[error("node {node} is not an endpoint of edge {edge}")]
    NotIncident { node: NodeId, edge: EdgeId },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SearchError {
    #[error("epsilon must lie in (0, 1], got {0}")]
    EpsilonOutOfRange(String),
    #[error("maximum trail length must be odd and positive, got {0}")]
    InvalidTrailLength(usize),
    #[error("starting edge set is not a triangle-free 2-matching")]
    InfeasibleInput,
    #[error("flip verification failed after {flips} flips: {detail}")]
    FlipCheckFailed { flips: usize, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("exact oracle limited to {limit} edges, graph has {edges}")]
    GuardExceeded { edges: usize, limit: usize },
    #[error("reference solution is not a triangle-free 2-matching")]
    InfeasibleReference,
    #[error(transparent)]
    Graph(#[from] GraphError),
}
