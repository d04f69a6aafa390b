//! Edge-list text format.
//!
//! ```text
//! # optional comments
//! n m
//! u v      (exactly m lines, 0 <= u, v < n, u != v)
//! ```
//!
//! Tokens are whitespace separated; LF and CRLF line endings are accepted.
//! Blank lines are ignored like comments.
//!
//! Solution files list one chosen edge per line as `u v`, with the same
//! comment rules and no header.

use crate::error::{GraphError, ParseError, ParseErrorKind};
use crate::graph::{EdgeSet, Graph, GraphBuilder, NodeId};

/// Upper bound on the declared node count accepted by the parser.
pub const MAX_NODES: usize = 1 << 20;

/// Non-comment, non-blank lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#')).then_some((i + 1, line))
    })
}

/// Parses exactly two whitespace-separated unsigned integers.
pub(crate) fn parse_pair(line: &str) -> Option<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it.next()?.parse().ok()?;
    let b = it.next()?.parse().ok()?;
    it.next().is_none().then_some((a, b))
}

pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or(ParseError::new(text.lines().count().max(1), ParseErrorKind::MissingHeader))?;
    let (n, m) =
        parse_pair(header).ok_or(ParseError::new(header_line, ParseErrorKind::MalformedHeader))?;
    if n > MAX_NODES {
        return Err(ParseError::new(header_line, ParseErrorKind::TooManyNodes(n)));
    }

    let mut builder = GraphBuilder::new(n);
    let mut found = 0usize;
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if found == m {
            return Err(ParseError::new(
                line_no,
                ParseErrorKind::EdgeCountMismatch {
                    expected: m,
                    found: found + 1,
                },
            ));
        }
        let (u, v) = parse_pair(line).ok_or(ParseError::new(line_no, ParseErrorKind::MalformedEdge))?;
        builder
            .add_edge(u, v)
            .map_err(|e| ParseError::new(line_no, e))?;
        found += 1;
    }
    if found != m {
        return Err(ParseError::new(
            last_line,
            ParseErrorKind::EdgeCountMismatch { expected: m, found },
        ));
    }
    Ok(builder.build())
}

/// Parses a solution file against `g`. Every pair must be an edge of `g`
/// and appear once.
pub fn parse_solution(g: &Graph, text: &str) -> Result<EdgeSet, ParseError> {
    let mut set = g.empty_set();
    for (line_no, line) in content_lines(text) {
        let (u, v) = parse_pair(line).ok_or(ParseError::new(line_no, ParseErrorKind::MalformedEdge))?;
        for w in [u, v] {
            if w >= g.node_count() {
                let err = GraphError::NodeOutOfRange {
                    node: w,
                    node_count: g.node_count(),
                };
                return Err(ParseError::new(line_no, err));
            }
        }
        let e = g
            .edge_between(u, v)
            .ok_or(ParseError::new(line_no, GraphError::NotAnEdge(u, v)))?;
        if !set.insert(e) {
            return Err(ParseError::new(line_no, GraphError::DuplicateEdge(u, v)));
        }
    }
    Ok(set)
}

/// Chosen edges as `u v` lines in edge-id order, endpoints as stored in `g`.
pub fn render_solution(g: &Graph, m: &EdgeSet) -> String {
    render_pairs(m.iter().map(|e| g.endpoints(e)))
}

pub fn render_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.node_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Renders node pairs one per line, as used for solution files.
pub fn render_pairs(pairs: impl IntoIterator<Item = (NodeId, NodeId)>) -> String {
    pairs
        .into_iter()
        .map(|(u, v)| format!("{u} {v}\n"))
        .collect()
}
