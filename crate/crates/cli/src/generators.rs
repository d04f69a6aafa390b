//! Instance generators. All randomness comes from the seed argument.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use trifree::{is_augmenting, EdgeSet, Graph, GraphError, Trail};

#[derive(Error, Debug, PartialEq)]
pub enum GenError {
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Erdős–Rényi graph: each pair joined independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GenError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GenError::BadParam(format!("p = {p} is not a probability")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::new(n, edges)?)
}

pub fn cycle(n: usize) -> Result<Graph, GenError> {
    if n < 3 {
        return Err(GenError::BadParam(format!("a cycle needs at least 3 nodes, got {n}")));
    }
    Ok(Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))?)
}

pub fn complete(n: usize) -> Result<Graph, GenError> {
    Ok(Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))?)
}

/// `k` triangles in a row, consecutive ones sharing a node.
pub fn bowtie_chain(k: usize) -> Result<Graph, GenError> {
    if k == 0 {
        return Err(GenError::BadParam("bowtie chain needs k >= 1".into()));
    }
    let mut edges = Vec::new();
    for i in 0..k {
        let (a, b, c) = (2 * i, 2 * i + 1, 2 * i + 2);
        edges.extend([(a, b), (b, c), (c, a)]);
    }
    Ok(Graph::new(2 * k + 1, edges)?)
}

pub fn petersen() -> Graph {
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::new(10, edges).expect("valid edge list")
}

/// `copies` disjoint triangles `a b c`, each with pendant edges `a x` and
/// `b y`, and the solution `{ax, ab, by}` on each. The only way to grow a
/// copy is the closed trail `c-b-a-c`; no augmenting simple path exists.
pub fn trailneed(copies: usize) -> Result<(Graph, EdgeSet), GenError> {
    if copies == 0 {
        return Err(GenError::BadParam("trailneed needs at least one copy".into()));
    }
    let mut edges = Vec::new();
    let mut chosen = Vec::new();
    for i in 0..copies {
        let (a, b, c, x, y) = (5 * i, 5 * i + 1, 5 * i + 2, 5 * i + 3, 5 * i + 4);
        edges.extend([(a, b), (b, c), (c, a), (a, x), (b, y)]);
        chosen.extend([(a, x), (a, b), (b, y)]);
    }
    let g = Graph::new(5 * copies, edges)?;
    let m = g.edge_set_from_pairs(chosen)?;
    Ok((g, m))
}

/// Every alternating trail of `g` relative to `m` that augments it, as walks,
/// found by exhaustive search. Only for small graphs.
pub fn augmenting_walks(g: &Graph, m: &EdgeSet) -> Vec<Trail> {
    fn extend(g: &Graph, m: &EdgeSet, t: &mut Trail, out: &mut Vec<Trail>) {
        if is_augmenting(g, t, m) {
            out.push(t.clone());
        }
        let u = t.last_node().expect("non-empty");
        let last = t.last_edge().expect("non-empty");
        for &(_, e) in g.neighbors(u) {
            if t.contains_edge(e) || m.contains(e) == m.contains(last) {
                continue;
            }
            t.push(g, e).expect("incident unused edge");
            extend(g, m, t, out);
            t.pop_last();
        }
    }
    let mut out = Vec::new();
    for e in 0..g.edge_count() {
        let (u, v) = g.endpoints(e);
        for first in [u, v] {
            let mut t = Trail::single(g, e, first).expect("endpoint");
            extend(g, m, &mut t, &mut out);
        }
    }
    out
}

/// For an instance that needs a trail: a closed augmenting trail, provided no
/// augmenting trail is a simple path.
pub fn trailneed_witness(g: &Graph, m: &EdgeSet) -> Option<Trail> {
    let all = augmenting_walks(g, m);
    let simple = |t: &Trail| {
        let mut nodes = t.walk().to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        nodes.len() == t.walk().len()
    };
    if all.iter().any(simple) {
        return None;
    }
    all.into_iter()
        .filter(Trail::is_closed)
        .min_by(|a, b| a.edges().cmp(b.edges()))
}
