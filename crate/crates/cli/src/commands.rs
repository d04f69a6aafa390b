//! Subcommands and their exit codes.
//!
//! | code | outcome |
//! |------|---------|
//! | 0 | success |
//! | 1 | internal assertion or write failure |
//! | 2 | unreadable or malformed input, bad arguments |
//! | 3 | instance too large for the exact oracle |
//! | 4 | infeasible input |

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use trifree::construct::{check_trail_family, construct_trails_with, to_dot, ConstructOptions, TriangleCount};
use trifree::oracle::exact_max_tiebreak;
use trifree::search::{maximal_solve_with_report, ptas_solve, Algorithm, SolveReport};
use trifree::{
    apply_trail, exact_max, parse_graph, parse_solution, render_graph, render_solution,
    ConstructError, EdgeSet, Epsilon, Graph, OracleError, ParseError, SearchConfig, SearchError,
};

use crate::bench::{run_bench, write_csv, BenchConfig};
use crate::formats::{SolveDocument, TrailsSummary, VerifyDocument, SOLVE_SCHEMA, TRAILS_SCHEMA, VERIFY_SCHEMA};
use crate::generators::{self, GenError};

pub const DEFAULT_SEED: u64 = 0x7472_6966;
pub const DEFAULT_EPSILON: &str = "0.5";

#[derive(Parser, Debug)]
#[command(name = "trifree", version, about = "Triangle-free 2-matchings: solve, verify, build augmenting trails")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a triangle-free 2-matching.
    Solve(SolveArgs),
    /// Check that a solution file is a triangle-free 2-matching.
    Verify(VerifyArgs),
    /// Build edge-disjoint augmenting trails between a solution and an optimum.
    Trails(TrailsArgs),
    /// Write a generated graph.
    Gen(GenArgs),
    /// Run every solver over a directory of graphs and write CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Ptas,
    Maximal,
    Exact,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Ptas => Algorithm::Ptas,
            AlgoArg::Maximal => Algorithm::Maximal,
            AlgoArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountArg {
    FirstEdge,
    WholeChunk,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "ptas")]
    pub algo: AlgoArg,
    /// Accuracy for `ptas` (decimal or p/q). Defaults to 0.5.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// Seed for the `maximal` insertion order.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Solution file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report file; stderr when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Re-check every flip of the local search.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub graph: PathBuf,
    pub solution: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrailsArgs {
    pub graph: PathBuf,
    pub apx: PathBuf,
    /// Optimum to compare against; computed exactly when omitted.
    #[arg(long)]
    pub opt: Option<PathBuf>,
    /// JSON lines trace, one record per chunk, then a summary; `-` for stdout.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Graphviz file of apx ∪ opt with the trails labelled.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "first-edge")]
    pub triangle_count: CountArg,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(subcommand)]
    pub model: Model,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Graph file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Model {
    /// Erdős–Rényi graph: each of the `n(n-1)/2` pairs is an edge with probability `p`.
    Gnp { n: usize, p: f64 },
    /// The cycle on `n >= 3` nodes.
    Cycle { n: usize },
    /// The complete graph on `n` nodes.
    Complete { n: usize },
    /// `k` triangles chained at shared nodes.
    BowtieChain { k: usize },
    /// The Petersen graph.
    Petersen,
    /// Copies of a graph whose solution can only grow along a closed trail.
    Trailneed {
        #[arg(long, default_value_t = 1)]
        copies: usize,
        /// Where to write the stored solution.
        #[arg(long)]
        apx: Option<PathBuf>,
        /// Where to write the solution after flipping the closed trail.
        #[arg(long)]
        flipped: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub corpus: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
    pub epsilon: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ptas,maximal,exact")]
    pub algos: Vec<AlgoArg>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill the `micros` column. Makes the output differ between runs.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Guard(OracleError),
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("write failed: {0}")]
    Write(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) | CliError::Write(_) => 1,
            CliError::Read { .. } | CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::GuardExceeded { .. } => CliError::Guard(e),
            OracleError::InfeasibleReference => CliError::Infeasible(e.to_string()),
            OracleError::Graph(g) => CliError::Internal(g.to_string()),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::EpsilonOutOfRange(_) | SearchError::InvalidTrailLength(_) => CliError::Usage(e.to_string()),
            SearchError::InfeasibleInput => CliError::Infeasible(e.to_string()),
            SearchError::FlipCheckFailed { .. } | SearchError::Graph(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Runs a parsed command line and returns the process exit code. Errors are
/// reported on `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Solve(a) => solve(&a, out, err),
        Command::Verify(a) => verify(&a, out),
        Command::Trails(a) => trails(&a, out, err),
        Command::Gen(a) => generate(&a, out),
        Command::Bench(a) => bench(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

pub fn read_graph(path: &Path) -> Result<Graph, CliError> {
    parse_graph(&read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

pub fn read_solution(g: &Graph, path: &Path) -> Result<EdgeSet, CliError> {
    parse_solution(g, &read(path)?).map_err(|source| CliError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Writes to `path`, or to `fallback` when there is no path or it is `-`.
fn emit(path: Option<&Path>, fallback: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text)?,
        _ => fallback.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn parse_epsilon(s: &str) -> Result<Epsilon, CliError> {
    s.parse::<Epsilon>()
        .map_err(|e| CliError::Usage(format!("--epsilon: {e}")))
}

fn solve(a: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    if a.epsilon.is_some() && a.algo != AlgoArg::Ptas {
        return Err(CliError::Usage("--epsilon only applies to --algo ptas".into()));
    }
    let g = read_graph(&a.graph)?;
    let (m, report) = match a.algo {
        AlgoArg::Ptas => {
            let eps = parse_epsilon(a.epsilon.as_deref().unwrap_or(DEFAULT_EPSILON))?;
            let cfg = SearchConfig::new(eps).with_verify_flips(a.verify);
            ptas_solve(&g, &cfg)?
        }
        AlgoArg::Maximal => maximal_solve_with_report(&g, a.seed),
        AlgoArg::Exact => {
            let clock = std::time::Instant::now();
            let m = exact_max(&g)?;
            let mut report = SolveReport::new(Algorithm::Exact);
            report.size = m.len();
            report.verified = g.is_feasible(&m);
            report.wall_micros = clock.elapsed().as_micros() as u64;
            (m, report)
        }
    };
    let feasible = g.is_feasible(&m);
    if !feasible {
        return Err(CliError::Internal(format!("{} produced an infeasible set", a.algo.to_possible_value().unwrap().get_name())));
    }
    emit(a.out.as_deref(), out, &render_solution(&g, &m))?;
    let doc = SolveDocument {
        schema: SOLVE_SCHEMA,
        instance: a.graph.display().to_string(),
        n: g.node_count(),
        m: g.edge_count(),
        feasible,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))? + "\n";
    emit(a.report.as_deref(), err, &json)?;
    Ok(0)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_graph(&a.graph)?;
    let m = read_solution(&g, &a.solution)?;
    let violation = g.feasibility_violation(&m);
    let doc = VerifyDocument {
        schema: VERIFY_SCHEMA,
        feasible: violation.is_none(),
        size: m.len(),
        violation,
    };
    let json = serde_json::to_string(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out, "{json}")?;
    Ok(if doc.feasible { 0 } else { 4 })
}

fn trails(a: &TrailsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let g = read_graph(&a.graph)?;
    let apx = read_solution(&g, &a.apx)?;
    if let Some(v) = g.feasibility_violation(&apx) {
        return Err(CliError::Infeasible(format!("apx: {v}")));
    }
    let opt = match &a.opt {
        Some(p) => {
            let opt = read_solution(&g, p)?;
            if let Some(v) = g.feasibility_violation(&opt) {
                return Err(CliError::Infeasible(format!("opt: {v}")));
            }
            opt
        }
        None => exact_max_tiebreak(&g, &apx)?,
    };
    let options = ConstructOptions {
        triangle_count: match a.triangle_count {
            CountArg::FirstEdge => TriangleCount::FirstEdge,
            CountArg::WholeChunk => TriangleCount::WholeChunk,
        },
    };
    let built = match construct_trails_with(&g, &apx, &opt, &options) {
        Ok(b) => b,
        Err(e) => {
            if let Some(dump) = e.dump() {
                let _ = writeln!(err, "{}", serde_json::to_string(dump).unwrap_or_default());
            }
            return Err(match e {
                ConstructError::InfeasibleInput(_) | ConstructError::Precondition(_) => {
                    CliError::Infeasible(e.to_string())
                }
                other => CliError::Internal(other.to_string()),
            });
        }
    };
    check_trail_family(&g, &apx, &opt, &built.trails).map_err(CliError::Internal)?;

    let walks: Vec<String> = built.trails.iter().map(|t| t.format_walk()).collect();
    let mut text = String::new();
    for w in &walks {
        text.push_str(w);
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;

    if let Some(path) = &a.trace {
        let mut lines = String::new();
        for record in &built.trace {
            lines += &serde_json::to_string(record).map_err(|e| CliError::Internal(e.to_string()))?;
            lines.push('\n');
        }
        let summary = TrailsSummary {
            schema: TRAILS_SCHEMA,
            apx_size: apx.len(),
            opt_size: opt.len(),
            trails: walks,
            steps: built.trace.len(),
        };
        lines += &serde_json::to_string(&summary).map_err(|e| CliError::Internal(e.to_string()))?;
        lines.push('\n');
        emit(Some(path), out, &lines)?;
    }
    if let Some(path) = &a.dot {
        emit(Some(path), out, &to_dot(&g, &apx, &opt, &built.trails))?;
    }
    Ok(0)
}

fn generate(a: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = match &a.model {
        Model::Gnp { n, p } => generators::gnp(*n, *p, a.seed)?,
        Model::Cycle { n } => generators::cycle(*n)?,
        Model::Complete { n } => generators::complete(*n)?,
        Model::BowtieChain { k } => generators::bowtie_chain(*k)?,
        Model::Petersen => generators::petersen(),
        Model::Trailneed { copies, apx, flipped } => {
            let (g, m) = generators::trailneed(*copies)?;
            let witness = generators::trailneed_witness(&g, &m)
                .ok_or_else(|| CliError::Internal("stored instance lost its property".into()))?;
            if let Some(p) = apx {
                fs::write(p, render_solution(&g, &m))?;
            }
            if let Some(p) = flipped {
                let next = apply_trail(&g, &m, &witness).map_err(|e| CliError::Internal(e.to_string()))?;
                fs::write(p, render_solution(&g, &next))?;
            }
            g
        }
    };
    emit(a.out.as_deref(), out, &render_graph(&g))?;
    Ok(0)
}

fn bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let epsilons = a
        .epsilon
        .iter()
        .map(|s| parse_epsilon(s))
        .collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        epsilons,
        algorithms: a.algos.iter().map(|&x| x.into()).collect(),
        seed: a.seed,
        timing: a.timing,
    };
    let rows = run_bench(&a.corpus, &cfg).map_err(|source| CliError::Read {
        path: a.corpus.clone(),
        source,
    })?;
    let mut buf = Vec::new();
    write_csv(&rows, &mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(
        a.out.as_deref(),
        out,
        std::str::from_utf8(&buf).map_err(|e| CliError::Internal(e.to_string()))?,
    )?;
    Ok(0)
}
