//! Benchmark harness: every solver on every corpus graph, one CSV row per
//! (instance, algorithm, epsilon).
//!
//! Output is a function of the corpus and the seed alone. Wall-clock times
//! are only written when asked for, since they differ between runs.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use trifree::oracle::{exact_max, EXACT_EDGE_LIMIT};
use trifree::search::Algorithm;
use trifree::{maximal_solve, parse_graph, ptas_solve, Epsilon, Graph, SearchConfig};

/// File extensions picked up from a corpus directory.
pub const CORPUS_EXTENSIONS: &[&str] = &["graph", "txt"];

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub epsilons: Vec<Epsilon>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub timing: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Row {
    pub instance: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub algo: String,
    pub epsilon: Option<String>,
    pub size: Option<usize>,
    pub opt_size: Option<usize>,
    pub ratio: Option<String>,
    pub flips: Option<usize>,
    pub micros: Option<u128>,
    pub status: String,
}

/// Corpus files sorted by file name.
pub fn corpus_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|x| x.to_str())
                    .is_some_and(|x| CORPUS_EXTENSIONS.contains(&x))
        })
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn planned(cfg: &BenchConfig) -> Vec<(Algorithm, Option<Epsilon>)> {
    let mut out = Vec::new();
    for &algo in &cfg.algorithms {
        if algo == Algorithm::Ptas {
            out.extend(cfg.epsilons.iter().map(|&e| (algo, Some(e))));
        } else {
            out.push((algo, None));
        }
    }
    out
}

fn ratio(size: usize, opt: Option<usize>) -> Option<String> {
    match opt {
        Some(0) => Some(format!("{:.6}", 1.0)),
        Some(o) => Some(format!("{:.6}", size as f64 / o as f64)),
        None => None,
    }
}

fn instance_rows(name: &str, g: &Graph, cfg: &BenchConfig, maximal_seed: u64) -> Vec<Row> {
    let opt = (g.edge_count() <= EXACT_EDGE_LIMIT)
        .then(|| exact_max(g).ok().map(|s| s.len()))
        .flatten();
    let base = Row {
        instance: name.to_string(),
        n: Some(g.node_count()),
        m: Some(g.edge_count()),
        opt_size: opt,
        ..Default::default()
    };
    let mut rows = Vec::new();
    for (algo, eps) in planned(cfg) {
        let mut row = Row {
            algo: algo.to_string(),
            epsilon: eps.map(|e| e.to_string()),
            ..base.clone()
        };
        let clock = Instant::now();
        let outcome: Result<(usize, usize), String> = match algo {
            Algorithm::Ptas => {
                let cfg = SearchConfig::new(eps.expect("ptas rows carry epsilon"));
                ptas_solve(g, &cfg)
                    .map(|(m, report)| (m.len(), report.flips))
                    .map_err(|e| e.to_string())
            }
            Algorithm::Maximal => Ok((maximal_solve(g, maximal_seed).len(), 0)),
            Algorithm::Exact => exact_max(g).map(|m| (m.len(), 0)).map_err(|e| e.to_string()),
        };
        let elapsed = clock.elapsed().as_micros();
        match outcome {
            Ok((size, flips)) => {
                row.size = Some(size);
                row.flips = Some(flips);
                row.ratio = ratio(size, opt);
                row.status = "ok".into();
            }
            Err(e) => row.status = e,
        }
        if cfg.timing {
            row.micros = Some(elapsed);
        }
        rows.push(row);
    }
    rows
}

/// Rows for every corpus file, ordered by file name then by algorithm plan.
/// Unreadable or malformed files produce rows with an error status.
pub fn run_bench(dir: &Path, cfg: &BenchConfig) -> io::Result<Vec<Row>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for path in corpus_files(dir)? {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let maximal_seed: u64 = rng.gen();
        let parsed = fs::read_to_string(&path)
            .map_err(|e| e.to_string())
            .and_then(|text| parse_graph(&text).map_err(|e| format!("parse error: {e}")));
        match parsed {
            Ok(g) => rows.extend(instance_rows(&name, &g, cfg, maximal_seed)),
            Err(status) => rows.extend(planned(cfg).into_iter().map(|(algo, eps)| Row {
                instance: name.clone(),
                algo: algo.to_string(),
                epsilon: eps.map(|e| e.to_string()),
                status: status.clone(),
                ..Default::default()
            })),
        }
    }
    Ok(rows)
}

/// CSV with a header line, even when there are no rows.
pub fn write_csv<W: io::Write>(rows: &[Row], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record([
        "instance", "n", "m", "algo", "epsilon", "size", "opt_size", "ratio", "flips", "micros", "status",
    ])?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
