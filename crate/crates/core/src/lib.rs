//! Triangle-free 2-matchings.
//!
//! A triangle-free 2-matching of a simple graph is an edge set in which every
//! node has degree at most two and no three chosen edges form a triangle.
//! This crate provides:
//!
//! - graphs, edge sets and the edge-list text format ([`graph`], [`text`]);
//! - trails with alternation and augmentation checks ([`trail`]);
//! - a local search that flips short augmenting trails, with a guaranteed
//!   approximation ratio, and a greedy maximal baseline ([`search`]);
//! - an exact branch-and-bound oracle for small graphs ([`oracle`]);
//! - an instrumented construction of edge-disjoint augmenting trails between
//!   an approximate and an optimal solution ([`construct`]).

pub mod construct;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod search;
pub mod text;
pub mod trail;

pub use construct::{construct_trails, ConstructError, ConstructionState};
pub use error::{GraphError, OracleError, ParseError, ParseErrorKind, SearchError, TrailError};
pub use graph::{EdgeId, EdgeSet, Graph, GraphBuilder, NodeId, Triangle, Violation};
pub use oracle::{enumerate_maximum, exact_max, exact_max_tiebreak};
pub use search::{
    find_augmenting_trail, max_trail_length, maximal_solve, ptas_solve, Epsilon, SearchConfig, SolveReport,
};
pub use text::{parse_graph, parse_solution, render_graph, render_solution};
pub use trail::{apply_trail, is_alternating, is_augmenting, parse_walk, Trail};
