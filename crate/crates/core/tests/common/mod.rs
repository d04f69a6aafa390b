//! Reference implementations used by the integration tests. Nothing here
//! calls into the search or oracle code under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trifree::{EdgeSet, Graph, Trail};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Every labelled graph on `n` nodes, by edge mask over the pairs of `0..n`.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &p)| p);
        Graph::new(n, edges).unwrap()
    })
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &(v, _) in g.neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Degree at most two and no triangle, by scanning every node triple.
pub fn naive_feasible(g: &Graph, chosen: &[bool]) -> bool {
    let n = g.node_count();
    let mut degree = vec![0; n];
    let mut adj = vec![vec![false; n]; n];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if chosen[e] {
            degree[u] += 1;
            degree[v] += 1;
            adj[u][v] = true;
            adj[v][u] = true;
        }
    }
    if degree.iter().any(|&d| d > 2) {
        return false;
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if adj[a][b] && adj[b][c] && adj[a][c] {
                    return false;
                }
            }
        }
    }
    true
}

pub fn mask_of(g: &Graph, s: &EdgeSet) -> Vec<bool> {
    (0..g.edge_count()).map(|e| s.contains(e)).collect()
}

/// Largest feasible edge subset, by trying all of them.
pub fn brute_force_max(g: &Graph) -> usize {
    let m = g.edge_count();
    assert!(m <= 22, "brute force is for tiny graphs");
    (0u32..1 << m)
        .filter_map(|mask| {
            let chosen: Vec<bool> = (0..m).map(|e| mask & (1 << e) != 0).collect();
            naive_feasible(g, &chosen).then_some(mask.count_ones() as usize)
        })
        .max()
        .unwrap_or(0)
}

/// Every feasible subset as a mask vector.
pub fn all_feasible(g: &Graph) -> Vec<Vec<bool>> {
    let m = g.edge_count();
    assert!(m <= 16);
    (0u32..1 << m)
        .map(|mask| (0..m).map(|e| mask & (1 << e) != 0).collect::<Vec<bool>>())
        .filter(|c| naive_feasible(g, c))
        .collect()
}

/// Greedy insertion over a random prefix of a random edge order: feasible,
/// usually not maximal.
pub fn random_feasible(g: &Graph, rng: &mut ChaCha8Rng) -> EdgeSet {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let keep = rng.gen_range(0..=order.len());
    let mut chosen = vec![false; g.edge_count()];
    for &e in &order[..keep] {
        chosen[e] = true;
        if !naive_feasible(g, &chosen) {
            chosen[e] = false;
        }
    }
    g.edge_set((0..g.edge_count()).filter(|&e| chosen[e])).unwrap()
}

/// Walks of every alternating trail with `1..=max_len` edges, in both
/// directions, found by unpruned depth-first enumeration.
pub fn alternating_walks(g: &Graph, m: &EdgeSet, max_len: usize) -> Vec<Vec<usize>> {
    fn extend(
        g: &Graph,
        m: &EdgeSet,
        max_len: usize,
        walk: &mut Vec<usize>,
        used: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !used.is_empty() {
            out.push(walk.clone());
        }
        if used.len() == max_len {
            return;
        }
        let u = *walk.last().unwrap();
        for &(v, e) in g.neighbors(u) {
            if used.contains(&e) {
                continue;
            }
            if let Some(&prev) = used.last() {
                if m.contains(prev) == m.contains(e) {
                    continue;
                }
            }
            used.push(e);
            walk.push(v);
            extend(g, m, max_len, walk, used, out);
            walk.pop();
            used.pop();
        }
    }
    let mut out = Vec::new();
    for s in g.nodes() {
        extend(g, m, max_len, &mut vec![s], &mut Vec::new(), &mut out);
    }
    out
}

/// Flipping the edges along `walk` gives a feasible set one larger than `m`.
pub fn naive_augments(g: &Graph, m: &EdgeSet, walk: &[usize]) -> bool {
    let mut chosen = mask_of(g, m);
    for w in walk.windows(2) {
        let e = g.edge_between(w[0], w[1]).unwrap();
        chosen[e] = !chosen[e];
    }
    chosen.iter().filter(|&&c| c).count() == m.len() + 1 && naive_feasible(g, &chosen)
}

/// A walk is a simple path when no node repeats.
pub fn is_simple_path(walk: &[usize]) -> bool {
    let mut seen = walk.to_vec();
    seen.sort();
    seen.dedup();
    seen.len() == walk.len()
}

pub fn trail_walk(t: &Trail) -> Vec<usize> {
    t.walk().to_vec()
}
