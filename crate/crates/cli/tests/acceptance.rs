//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Sample sizes can be raised with `TRIFREE_ACCEPT_SCALE` (a multiplier for
//! the sampled parts); the defaults are the pinned minimums.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use trifree::construct::{construct_trails_with, ConstructOptions};
use trifree::{
    exact_max, exact_max_tiebreak, find_augmenting_trail, maximal_solve, parse_graph, parse_solution, ptas_solve,
    EdgeSet, Epsilon, Graph, SearchConfig,
};
use trifree_cli::generators;

use common::{all_graphs, is_connected, mask_of, naive_augments, naive_feasible, random_feasible, rng};

const EPSILONS: [(u64, u64); 3] = [(1, 1), (1, 2), (1, 4)];
const PROBABILITIES: [f64; 3] = [0.3, 0.5, 0.8];
const SEEDS_PER_CELL: u64 = 24;
const MAXIMAL_ORDERS: u64 = 5;
const APX_PER_GRAPH: u64 = 20;
const SAMPLED_PER_SIZE: usize = 1000;
const SEARCH_MAX_LEN: usize = 7;
const SUITE_BUDGET: Duration = Duration::from_secs(120);

fn scale() -> usize {
    std::env::var("TRIFREE_ACCEPT_SCALE")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&s| s >= 1)
        .unwrap_or(1)
}

/// Maximum size by depth-first search over edges with a degree-capacity
/// bound. Written without the library's oracle.
fn reference_max(g: &Graph) -> usize {
    struct S<'a> {
        edges: &'a [(usize, usize)],
        n: usize,
        adj: Vec<Vec<bool>>,
        degree: Vec<usize>,
        open: Vec<usize>,
        size: usize,
        best: usize,
    }
    impl S<'_> {
        fn go(&mut self, i: usize) {
            if self.best == self.n {
                return;
            }
            let cap: usize = (0..self.n).map(|u| (2 - self.degree[u]).min(self.open[u])).sum();
            if self.size + (self.edges.len() - i).min(cap / 2) <= self.best {
                return;
            }
            if i == self.edges.len() {
                self.best = self.size;
                return;
            }
            let (u, v) = self.edges[i];
            self.open[u] -= 1;
            self.open[v] -= 1;
            let closes = (0..self.n).any(|w| self.adj[u][w] && self.adj[v][w]);
            if self.degree[u] < 2 && self.degree[v] < 2 && !closes {
                self.adj[u][v] = true;
                self.adj[v][u] = true;
                self.degree[u] += 1;
                self.degree[v] += 1;
                self.size += 1;
                self.go(i + 1);
                self.size -= 1;
                self.degree[u] -= 1;
                self.degree[v] -= 1;
                self.adj[u][v] = false;
                self.adj[v][u] = false;
            }
            self.go(i + 1);
            self.open[u] += 1;
            self.open[v] += 1;
        }
    }
    let n = g.node_count();
    let mut open = vec![0; n];
    for &(u, v) in g.edges() {
        open[u] += 1;
        open[v] += 1;
    }
    let mut s = S {
        edges: g.edges(),
        n,
        adj: vec![vec![false; n]; n],
        degree: vec![0; n],
        open,
        size: 0,
        best: 0,
    };
    s.go(0);
    s.best
}

/// Smallest edge-id sequence of an augmenting alternating trail with at most
/// `max_len` edges, by unpruned enumeration of alternating trails.
fn naive_smallest_augmenting(g: &Graph, m: &EdgeSet, max_len: usize) -> Option<Vec<usize>> {
    fn extend(
        g: &Graph,
        m: &EdgeSet,
        max_len: usize,
        walk: &mut Vec<usize>,
        used: &mut Vec<usize>,
        best: &mut Option<Vec<usize>>,
    ) {
        // Only odd trails starting and ending outside m can add one edge.
        if used.len() % 2 == 1
            && !m.contains(used[0])
            && !m.contains(*used.last().unwrap())
            && best.as_ref().is_none_or(|b| &**used < b)
            && naive_augments(g, m, walk)
        {
            *best = Some(used.clone());
        }
        if used.len() == max_len {
            return;
        }
        let u = *walk.last().unwrap();
        for &(v, e) in g.neighbors(u) {
            if used.contains(&e) || m.contains(*used.last().unwrap()) == m.contains(e) {
                continue;
            }
            used.push(e);
            walk.push(v);
            extend(g, m, max_len, walk, used, best);
            walk.pop();
            used.pop();
        }
    }
    let mut best = None;
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        for (a, b) in [(u, v), (v, u)] {
            extend(g, m, max_len, &mut vec![a, b], &mut vec![e], &mut best);
        }
    }
    best
}

fn naive_degrees(g: &Graph, s: &EdgeSet) -> Vec<usize> {
    let mut d = vec![0; g.node_count()];
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        if s.contains(e) {
            d[u] += 1;
            d[v] += 1;
        }
    }
    d
}

/// No single edge can be added while staying feasible.
fn naive_maximal(g: &Graph, s: &EdgeSet) -> bool {
    let mut chosen = mask_of(g, s);
    (0..g.edge_count()).all(|e| {
        if chosen[e] {
            return true;
        }
        chosen[e] = true;
        let ok = !naive_feasible(g, &chosen);
        chosen[e] = false;
        ok
    })
}

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn check(failures: &[String], detail: String) -> Self {
        let mut detail = detail;
        if let Some(first) = failures.first() {
            let _ = write!(detail, "; {} failure(s), first: {first}", failures.len());
        }
        Outcome {
            passed: failures.is_empty(),
            detail,
        }
    }
}

struct Corpus {
    /// G(n,p) instances for criteria 1 and 2, with their reference optimum.
    gnp: Vec<(String, Graph, usize)>,
    /// (graph, apx, opt) pairs for criteria 3 and 4.
    pairs: Vec<(Graph, EdgeSet, EdgeSet)>,
    /// Graphs of criterion 3, for criterion 6.
    connected: Vec<Graph>,
}

fn gnp_corpus() -> Vec<(String, Graph, usize)> {
    let mut out = Vec::new();
    for n in 4..=10 {
        for (pi, &p) in PROBABILITIES.iter().enumerate() {
            for s in 0..SEEDS_PER_CELL * scale() as u64 {
                let seed = (n as u64) << 32 | (pi as u64) << 16 | s;
                let g = generators::gnp(n, p, seed).unwrap();
                let opt = reference_max(&g);
                out.push((format!("gnp n={n} p={p} seed={seed:#x}"), g, opt));
            }
        }
    }
    out
}

fn criterion_1(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut checked = 0;
    for (name, g, opt) in &corpus.gnp {
        match exact_max(g) {
            Ok(m) if m.len() == *opt => {}
            other => failures.push(format!("{name}: exact_max {:?} vs reference {opt}", other.map(|m| m.len()))),
        }
        for (num, den) in EPSILONS {
            let eps = Epsilon::from_ratio(num, den).unwrap();
            let (m, _) = ptas_solve(g, &SearchConfig::new(eps)).unwrap();
            // ceil((1 - num/den) * opt) in integers.
            let bound = ((den - num) as usize * opt).div_ceil(den as usize);
            if !naive_feasible(g, &mask_of(g, &m)) || m.len() < bound {
                failures.push(format!("{name} eps={num}/{den}: size {} < {bound}", m.len()));
            }
            checked += 1;
        }
    }
    Outcome::check(
        &failures,
        format!("{} instances, {checked} (instance, epsilon) runs", corpus.gnp.len()),
    )
}

fn criterion_2(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut orders = rng(2);
    for (name, g, opt) in &corpus.gnp {
        for _ in 0..MAXIMAL_ORDERS {
            let seed: u64 = orders.gen();
            let m = maximal_solve(g, seed);
            if !naive_maximal(g, &m) || !naive_feasible(g, &mask_of(g, &m)) || 2 * m.len() < *opt {
                failures.push(format!("{name} order {seed:#x}: size {} vs opt {opt}", m.len()));
            }
        }
    }
    Outcome::check(
        &failures,
        format!("{} instances x {MAXIMAL_ORDERS} orders", corpus.gnp.len()),
    )
}

/// Criterion 3 corpus: every connected graph with n <= 6 and sampled
/// connected graphs with n in {7, 8}.
fn connected_graphs() -> Vec<Graph> {
    let mut out: Vec<Graph> = (1..=6).flat_map(all_graphs).filter(is_connected).collect();
    let mut r = rng(3);
    for n in [7, 8] {
        let mut taken = 0;
        while taken < SAMPLED_PER_SIZE * scale() {
            let g = common::gnp(n, r.gen_range(0.25..0.9), &mut r);
            if is_connected(&g) {
                out.push(g);
                taken += 1;
            }
        }
    }
    out
}

fn criterion_3(corpus: &mut Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut seeds = rng(30);
    let mut apx_tested = 0;
    for g in &corpus.connected {
        let opt_size = reference_max(g);
        let mut seen: Vec<EdgeSet> = Vec::new();
        for _ in 0..APX_PER_GRAPH {
            let apx = maximal_solve(g, seeds.gen());
            apx_tested += 1;
            if seen.contains(&apx) {
                continue;
            }
            seen.push(apx.clone());
            if !naive_maximal(g, &apx) {
                failures.push(format!("{:?}: {apx:?} is not maximal", g.edges()));
                continue;
            }
            let opt = exact_max_tiebreak(g, &apx).unwrap();
            if opt.len() != opt_size || !naive_feasible(g, &mask_of(g, &opt)) {
                failures.push(format!("{:?}: tiebreak optimum {opt:?} has wrong size", g.edges()));
                continue;
            }
            let (da, dopt) = (naive_degrees(g, &apx), naive_degrees(g, &opt));
            if let Some(u) = (0..g.node_count()).find(|&u| da[u] > dopt[u]) {
                failures.push(format!("{:?}: apx {apx:?} opt {opt:?} node {u}", g.edges()));
            }
            corpus.pairs.push((g.clone(), apx, opt));
        }
    }
    Outcome::check(
        &failures,
        format!(
            "{} connected graphs, {apx_tested} maximal solutions ({} distinct)",
            corpus.connected.len(),
            corpus.pairs.len()
        ),
    )
}

fn criterion_4(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut built = 0;
    let mut trails = 0;
    for (g, apx, opt) in corpus.pairs.iter().filter(|(_, a, o)| o.len() > a.len()) {
        built += 1;
        let family = match construct_trails_with(g, apx, opt, &ConstructOptions::default()) {
            Ok(c) => c.trails,
            Err(e) => {
                failures.push(format!("{:?} apx {apx:?} opt {opt:?}: {e}", g.edges()));
                continue;
            }
        };
        trails += family.len();
        // Independent re-check of the returned family.
        let mut used = vec![false; g.edge_count()];
        let mut ok = family.len() == opt.len() - apx.len();
        for t in &family {
            for &e in t.edges() {
                ok &= apx.contains(e) != opt.contains(e) && !used[e];
                used[e] = true;
            }
            ok &= naive_augments(g, apx, t.walk());
        }
        if !ok {
            let walks: Vec<String> = family.iter().map(|t| t.to_string()).collect();
            failures.push(format!("{:?} apx {apx:?} opt {opt:?}: bad family {walks:?}", g.edges()));
        }
    }
    Outcome::check(&failures, format!("{built} pairs with |OPT| > |APX|, {trails} trails"))
}

fn trifree(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_trifree"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = trifree(
        &["gen", "trailneed", "--apx", "apx.sol", "--flipped", "flipped.sol", "--out", "g.graph"],
        d,
    );
    if !gen.status.success() {
        failures.push(format!("gen trailneed exited {:?}", gen.status.code()));
        return Outcome::check(&failures, String::new());
    }
    let g = parse_graph(&fs::read_to_string(d.join("g.graph")).unwrap()).unwrap();
    let apx = parse_solution(&g, &fs::read_to_string(d.join("apx.sol")).unwrap()).unwrap();
    let flipped = parse_solution(&g, &fs::read_to_string(d.join("flipped.sol")).unwrap()).unwrap();
    if g.node_count() > 8 {
        failures.push(format!("instance has {} nodes", g.node_count()));
    }
    if !naive_feasible(&g, &mask_of(&g, &apx)) {
        failures.push("stored solution is infeasible".into());
    }

    // Independent enumeration of every alternating trail (no length cap).
    let walks = common::alternating_walks(&g, &apx, g.edge_count());
    let augmenting: Vec<&Vec<usize>> = walks.iter().filter(|w| naive_augments(&g, &apx, w)).collect();
    let simple = augmenting.iter().filter(|w| common::is_simple_path(w)).count();
    let closed = augmenting.iter().filter(|w| w.first() == w.last()).count();
    if simple != 0 {
        failures.push(format!("{simple} augmenting simple paths exist"));
    }
    if closed == 0 {
        failures.push("no closed augmenting trail".into());
    }
    if flipped.len() != apx.len() + 1 || !naive_feasible(&g, &mask_of(&g, &flipped)) {
        failures.push("flipped solution is not one larger and feasible".into());
    }
    // The flip must come from one closed augmenting trail.
    let from_trail = augmenting.iter().any(|w| {
        let mut m = mask_of(&g, &apx);
        for p in w.windows(2) {
            let e = g.edge_between(p[0], p[1]).unwrap();
            m[e] = !m[e];
        }
        w.first() == w.last() && m == mask_of(&g, &flipped)
    });
    if !from_trail {
        failures.push("flipped solution does not match a closed augmenting trail".into());
    }
    let verify = trifree(&["verify", "g.graph", "flipped.sol"], d);
    let doc: serde_json::Value = serde_json::from_slice(&verify.stdout).unwrap_or_default();
    if verify.status.code() != Some(0) || doc["feasible"] != true || doc["size"] != flipped.len() {
        failures.push(format!("verify exited {:?}: {doc}", verify.status.code()));
    }
    Outcome::check(
        &failures,
        format!(
            "n={}, {} augmenting trails ({closed} closed, {simple} simple paths), verify exit {:?}",
            g.node_count(),
            augmenting.len(),
            verify.status.code()
        ),
    )
}

fn criterion_6(corpus: &Corpus) -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    let mut with_trail = 0;
    let mut r = rng(6);
    let graphs = corpus
        .gnp
        .iter()
        .map(|(_, g, _)| g)
        .chain(&corpus.connected)
        .filter(|g| g.node_count() <= 8);
    for g in graphs {
        let sets = [g.empty_set(), maximal_solve(g, r.gen()), random_feasible(g, &mut r)];
        for m in &sets {
            cases += 1;
            let found = find_augmenting_trail(g, m, SEARCH_MAX_LEN, None).unwrap();
            let expected = naive_smallest_augmenting(g, m, SEARCH_MAX_LEN);
            with_trail += expected.is_some() as usize;
            let agrees = match (&found, &expected) {
                (None, None) => true,
                (Some(t), Some(e)) => {
                    t.edges() == e.as_slice() && t.len() <= SEARCH_MAX_LEN && naive_augments(g, m, t.walk())
                }
                _ => false,
            };
            if !agrees {
                failures.push(format!(
                    "{:?} m {m:?}: search {:?} naive {expected:?}",
                    g.edges(),
                    found.map(|t| t.edges().to_vec())
                ));
            }
        }
    }
    Outcome::check(
        &failures,
        format!("{cases} (graph, solution) cases, {with_trail} with an augmenting trail"),
    )
}

fn criterion_7() -> Outcome {
    let mut failures = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("corpus")).unwrap();
    let mut r = rng(7);
    for i in 0..12 {
        let n = r.gen_range(4..=10).to_string();
        let p = PROBABILITIES[i % 3].to_string();
        let seed = r.gen::<u64>().to_string();
        let out = format!("corpus/g{i:02}.graph");
        let o = trifree(&["gen", "--seed", &seed, "--out", &out, "gnp", &n, &p], d);
        if !o.status.success() {
            failures.push(format!("gen {out} failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    fs::write(d.join("corpus/broken.graph"), "3 2\n0 1\n").unwrap();
    let run = |out: &str| {
        let o = trifree(&["bench", "corpus", "--seed", "99", "--out", out], d);
        (o.status.code(), fs::read(d.join(out)).unwrap_or_default())
    };
    let (code_a, a) = run("a.csv");
    let (code_b, b) = run("b.csv");
    if code_a != Some(0) || code_b != Some(0) {
        failures.push(format!("bench exited {code_a:?}, {code_b:?}"));
    }
    if a != b {
        failures.push("outputs differ".into());
    }
    // Oracle rows also respect the approximation ratio.
    let text = String::from_utf8_lossy(&a);
    let mut rows = 0;
    for line in text.lines().skip(1) {
        rows += 1;
        let cols: Vec<&str> = line.split(',').collect();
        if cols[3] == "ptas" && !cols[7].is_empty() {
            let eps: f64 = cols[4].parse().unwrap();
            let ratio: f64 = cols[7].parse().unwrap();
            if ratio < 1.0 - eps - 1e-9 {
                failures.push(format!("ratio below 1 - eps: {line}"));
            }
        }
    }
    Outcome::check(&failures, format!("{} bytes, {rows} rows", a.len()))
}

fn main() -> ExitCode {
    let suite = Instant::now();
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id, name, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let outcome = f();
        results.push((id, name, outcome, t.elapsed()));
    };

    let mut corpus = Corpus {
        gnp: Vec::new(),
        pairs: Vec::new(),
        connected: Vec::new(),
    };
    let t = Instant::now();
    corpus.gnp = gnp_corpus();
    corpus.connected = connected_graphs();
    let setup = t.elapsed();

    timed(1, "ptas guarantee", &mut || criterion_1(&corpus));
    timed(2, "maximal 2-approximation", &mut || criterion_2(&corpus));
    timed(3, "degree domination", &mut || criterion_3(&mut corpus));
    timed(4, "trail construction", &mut || criterion_4(&corpus));
    timed(5, "trail needed, no augmenting path", &mut criterion_5);
    timed(6, "search matches enumeration", &mut || criterion_6(&corpus));
    timed(7, "bench determinism", &mut criterion_7);

    let total = suite.elapsed();
    println!("acceptance: corpus built in {:.1}s", setup.as_secs_f64());
    let mut all = true;
    for (id, name, outcome, elapsed) in &results {
        // Criterion 1 carries the wall-clock budget for the whole suite.
        let passed = outcome.passed && (*id != 1 || total < SUITE_BUDGET);
        all &= passed;
        println!(
            "{} criterion {id} ({name}): {} [{:.1}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: suite took {:.1}s (budget {}s)",
        total.as_secs_f64(),
        SUITE_BUDGET.as_secs()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
