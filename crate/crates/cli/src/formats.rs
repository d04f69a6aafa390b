//! JSON documents written by the command-line tool. Each carries a
//! `schema` tag so that outputs from different revisions can be told apart.

use serde::Serialize;

use trifree::search::SolveReport;
use trifree::Violation;

pub const SOLVE_SCHEMA: &str = "trifree-solve/1";
pub const VERIFY_SCHEMA: &str = "trifree-verify/1";
pub const TRAILS_SCHEMA: &str = "trifree-trails/1";

#[derive(Debug, Serialize)]
pub struct SolveDocument<'a> {
    pub schema: &'static str,
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub feasible: bool,
    pub report: &'a SolveReport,
}

#[derive(Debug, Serialize)]
pub struct VerifyDocument {
    pub schema: &'static str,
    pub feasible: bool,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// Summary line written after the trace records.
#[derive(Debug, Serialize)]
pub struct TrailsSummary {
    pub schema: &'static str,
    pub apx_size: usize,
    pub opt_size: usize,
    pub trails: Vec<String>,
    pub steps: usize,
}
