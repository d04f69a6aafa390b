//! Local search over short augmenting trails, and the greedy maximal baseline.
//!
//! The local search starts from the empty solution and flips augmenting
//! trails with at most `max_trail_len` edges until none is left. With
//! `max_trail_len` the largest odd integer not above `2/epsilon`, the result
//! has at least `(1 - epsilon)` times the optimum number of edges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::SearchError;
use crate::graph::{EdgeId, EdgeSet, Graph, NodeId};
use crate::trail::{apply_trail, Trail};

/// Accuracy parameter in `(0, 1]`, held as an exact fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Epsilon {
    num: u64,
    den: u64,
}

impl Epsilon {
    pub fn from_ratio(num: u64, den: u64) -> Result<Self, SearchError> {
        if num == 0 || den == 0 || num > den {
            return Err(SearchError::EpsilonOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Exact conversion of the shortest decimal form of `value`.
    pub fn from_f64(value: f64) -> Result<Self, SearchError> {
        if !value.is_finite() {
            return Err(SearchError::EpsilonOutOfRange(value.to_string()));
        }
        value.to_string().parse()
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `ceil((1 - epsilon) * opt)`: the smallest size the local search may return.
    pub fn guaranteed_size(&self, opt: usize) -> usize {
        let (num, den, opt) = (self.num as u128, self.den as u128, opt as u128);
        ((den - num) * opt).div_ceil(den) as usize
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl FromStr for Epsilon {
    type Err = SearchError;

    /// Accepts decimals (`0.25`) and fractions (`1/4`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SearchError::EpsilonOutOfRange(s.to_string());
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Self::from_ratio(n, d).map_err(|_| bad());
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty()
            || !int.bytes().all(|b| b.is_ascii_digit())
            || !frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(bad());
        }
        let frac = frac.trim_end_matches('0');
        if frac.len() > 18 {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_val: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Self::from_ratio(num, den).map_err(|_| bad())
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Serialize for Epsilon {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// Largest odd integer not above `floor(2 / epsilon)`, at least 1.
pub fn max_trail_length(epsilon: Epsilon) -> usize {
    let bound = (2 * epsilon.den as u128 / epsilon.num as u128).min(usize::MAX as u128) as usize;
    let odd = if bound % 2 == 1 { bound } else { bound.saturating_sub(1) };
    odd.max(1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub epsilon: Epsilon,
    pub max_trail_len: usize,
    /// `None` scans edges by ascending id; `Some(seed)` by a seeded permutation.
    pub order_seed: Option<u64>,
    pub verify_flips: bool,
}

impl SearchConfig {
    pub fn new(epsilon: Epsilon) -> Self {
        Self {
            epsilon,
            max_trail_len: max_trail_length(epsilon),
            order_seed: None,
            verify_flips: true,
        }
    }

    pub fn with_order_seed(mut self, seed: Option<u64>) -> Self {
        self.order_seed = seed;
        self
    }

    pub fn with_verify_flips(mut self, verify: bool) -> Self {
        self.verify_flips = verify;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Ptas,
    Maximal,
    Exact,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Ptas => "ptas",
            Algorithm::Maximal => "maximal",
            Algorithm::Exact => "exact",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub epsilon: Option<Epsilon>,
    pub max_trail_len: Option<usize>,
    pub size: usize,
    pub flips: usize,
    /// Flipped trail length -> count.
    pub trail_lengths: BTreeMap<usize, usize>,
    pub wall_micros: u64,
    pub verified: bool,
}

impl SolveReport {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            epsilon: None,
            max_trail_len: None,
            size: 0,
            flips: 0,
            trail_lengths: BTreeMap::new(),
            wall_micros: 0,
            verified: false,
        }
    }
}

/// Rank of every edge in the scan order.
fn edge_ranks(m: usize, seed: Option<u64>) -> Vec<usize> {
    let mut order: Vec<EdgeId> = (0..m).collect();
    if let Some(seed) = seed {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut rank = vec![0; m];
    for (r, e) in order.into_iter().enumerate() {
        rank[e] = r;
    }
    rank
}

struct TrailSearch<'a> {
    g: &'a Graph,
    m: &'a EdgeSet,
    max_len: usize,
    by_rank: Vec<Vec<(NodeId, EdgeId)>>,
    /// `m` xor the current prefix.
    flipped: EdgeSet,
    degree: Vec<usize>,
    trail: Trail,
    found: Option<Trail>,
}

impl<'a> TrailSearch<'a> {
    fn new(g: &'a Graph, m: &'a EdgeSet, max_len: usize, rank: &[usize]) -> Self {
        let by_rank = g
            .nodes()
            .map(|u| {
                let mut nb = g.neighbors(u).to_vec();
                nb.sort_by_key(|&(_, e)| rank[e]);
                nb
            })
            .collect();
        Self {
            g,
            m,
            max_len,
            by_rank,
            flipped: m.clone(),
            degree: g.nodes().map(|u| g.degree_in_unchecked(u, m)).collect(),
            trail: Trail::empty(),
            found: None,
        }
    }

    fn flip(&mut self, e: EdgeId) {
        let (u, v) = self.g.endpoints(e);
        if self.flipped.toggle(e) {
            self.degree[u] += 1;
            self.degree[v] += 1;
        } else {
            self.degree[u] -= 1;
            self.degree[v] -= 1;
        }
    }

    /// Whether flipping the current (odd, alternating) prefix is feasible.
    /// Interior visits keep degrees, so only walk nodes need checking, and
    /// any new triangle must use an edge the prefix adds.
    fn prefix_feasible(&self) -> bool {
        if self.trail.walk().iter().any(|&u| self.degree[u] > 2) {
            return false;
        }
        self.trail
            .edges()
            .iter()
            .filter(|&&e| !self.m.contains(e))
            .all(|&e| {
                let (u, v) = self.g.endpoints(e);
                self.g.common_neighbors_in(u, v, &self.flipped).next().is_none()
            })
    }

    fn dfs(&mut self) -> bool {
        let len = self.trail.len();
        if len % 2 == 1 && self.prefix_feasible() {
            self.found = Some(self.trail.clone());
            return true;
        }
        if len >= self.max_len {
            return false;
        }
        let last = self.trail.last_node().expect("non-empty prefix");
        let want_in_m = !self.m.contains(self.trail.last_edge().expect("non-empty prefix"));
        for i in 0..self.by_rank[last].len() {
            let (_, e) = self.by_rank[last][i];
            if self.m.contains(e) != want_in_m || self.trail.contains_edge(e) {
                continue;
            }
            self.trail.push(self.g, e).expect("incident fresh edge");
            self.flip(e);
            let hit = self.dfs();
            self.flip(e);
            self.trail.pop_last();
            if hit {
                return true;
            }
        }
        false
    }

    /// Lexicographically smallest augmenting trail whose first edge is `e`.
    fn search_from_edge(&mut self, e: EdgeId) -> Option<Trail> {
        let (u, v) = self.g.endpoints(e);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let mut best: Option<(Vec<EdgeId>, Trail)> = None;
        for start in [a, b] {
            // The start node gains an edge whatever the rest of the trail does.
            if self.degree[start] >= 2 {
                continue;
            }
            self.trail = Trail::single(self.g, e, start).expect("endpoint");
            self.flip(e);
            self.found = None;
            self.dfs();
            self.flip(e);
            self.trail = Trail::empty();
            if let Some(t) = self.found.take() {
                let key = t.edges().to_vec();
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, t));
                }
            }
        }
        best.map(|(_, t)| t)
    }
}

/// Smallest augmenting trail for `m` with at most `max_len` edges, compared
/// as sequences of edge ranks (ascending ids, or the permutation drawn from
/// `order_seed`). Exhaustive: `None` means no such trail exists.
pub fn find_augmenting_trail(
    g: &Graph,
    m: &EdgeSet,
    max_len: usize,
    order_seed: Option<u64>,
) -> Result<Option<Trail>, SearchError> {
    if max_len == 0 || max_len.is_multiple_of(2) {
        return Err(SearchError::InvalidTrailLength(max_len));
    }
    if !m.is_owned_by(g) {
        return Err(crate::error::GraphError::OwnerMismatch.into());
    }
    if !g.is_feasible(m) {
        return Err(SearchError::InfeasibleInput);
    }
    let rank = edge_ranks(g.edge_count(), order_seed);
    Ok(find_with_ranks(g, m, max_len, &rank))
}

fn find_with_ranks(g: &Graph, m: &EdgeSet, max_len: usize, rank: &[usize]) -> Option<Trail> {
    let mut starts: Vec<EdgeId> = (0..g.edge_count()).filter(|&e| !m.contains(e)).collect();
    starts.sort_by_key(|&e| rank[e]);
    let mut search = TrailSearch::new(g, m, max_len, rank);
    starts.into_iter().find_map(|e| search.search_from_edge(e))
}

/// Local search from the empty solution.
pub fn ptas_solve(g: &Graph, cfg: &SearchConfig) -> Result<(EdgeSet, SolveReport), SearchError> {
    ptas_improve(g, g.empty_set(), cfg)
}

/// Local search from any feasible starting solution.
pub fn ptas_improve(
    g: &Graph,
    start: EdgeSet,
    cfg: &SearchConfig,
) -> Result<(EdgeSet, SolveReport), SearchError> {
    if cfg.max_trail_len == 0 || cfg.max_trail_len.is_multiple_of(2) {
        return Err(SearchError::InvalidTrailLength(cfg.max_trail_len));
    }
    if !start.is_owned_by(g) {
        return Err(crate::error::GraphError::OwnerMismatch.into());
    }
    if !g.is_feasible(&start) {
        return Err(SearchError::InfeasibleInput);
    }
    let clock = Instant::now();
    let rank = edge_ranks(g.edge_count(), cfg.order_seed);
    let mut report = SolveReport::new(Algorithm::Ptas);
    report.epsilon = Some(cfg.epsilon);
    report.max_trail_len = Some(cfg.max_trail_len);

    let mut apx = start;
    let limit = g.node_count().saturating_sub(apx.len());
    while let Some(trail) = find_with_ranks(g, &apx, cfg.max_trail_len, &rank) {
        let next = apply_trail(g, &apx, &trail)?;
        if cfg.verify_flips && (next.len() != apx.len() + 1 || !g.is_feasible(&next)) {
            return Err(SearchError::FlipCheckFailed {
                flips: report.flips,
                detail: format!("trail {trail} does not augment"),
            });
        }
        apx = next;
        report.flips += 1;
        *report.trail_lengths.entry(trail.len()).or_default() += 1;
        if report.flips > limit {
            return Err(SearchError::FlipCheckFailed {
                flips: report.flips,
                detail: format!("more than {limit} flips"),
            });
        }
    }
    report.size = apx.len();
    report.verified = g.is_feasible(&apx);
    report.wall_micros = clock.elapsed().as_micros() as u64;
    Ok((apx, report))
}

/// Adding `e` to `m` keeps it a triangle-free 2-matching.
pub fn can_insert(g: &Graph, m: &EdgeSet, e: EdgeId) -> bool {
    let (u, v) = g.endpoints(e);
    !m.contains(e)
        && g.degree_in_unchecked(u, m) < 2
        && g.degree_in_unchecked(v, m) < 2
        && g.common_neighbors_in(u, v, m).next().is_none()
}

/// Greedy insertion in a seeded random edge order. The result is maximal:
/// no single edge can be added.
pub fn maximal_solve(g: &Graph, order_seed: u64) -> EdgeSet {
    let mut order: Vec<EdgeId> = (0..g.edge_count()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(order_seed));
    let mut m = g.empty_set();
    for e in order {
        if can_insert(g, &m, e) {
            m.insert(e);
        }
    }
    m
}

pub fn maximal_solve_with_report(g: &Graph, order_seed: u64) -> (EdgeSet, SolveReport) {
    let clock = Instant::now();
    let m = maximal_solve(g, order_seed);
    let mut report = SolveReport::new(Algorithm::Maximal);
    report.size = m.len();
    report.verified = g.is_feasible(&m);
    report.wall_micros = clock.elapsed().as_micros() as u64;
    (m, report)
}
