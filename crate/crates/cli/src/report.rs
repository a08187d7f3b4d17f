//! Serializable reports. Field order is fixed and nothing depends on the
//! clock, so equal inputs give byte-identical JSON.

use arad::catalog::{CheckOutcome, Confidence, EvalOptions, Kind, NormReading, Verdict};
use num_complex::Complex64;
use serde::Serialize;

pub const TOOL: &str = "arad";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Complex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

/// Evaluation settings echoed into every report.
#[derive(Debug, Clone, Serialize)]
pub struct EvalConfig {
    pub grid_points: usize,
    pub refine_tol: f64,
    pub max_refine_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    pub norm_reading: NormReading,
    pub r29_literal_p: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z1: Option<Complex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z2: Option<Complex>,
}

impl EvalConfig {
    pub fn new(opts: &EvalOptions, rank_tol: Option<f64>) -> Self {
        Self {
            grid_points: opts.sweep.grid_points,
            refine_tol: opts.sweep.refine_tol,
            max_refine_iters: opts.sweep.max_refine_iters,
            rank_tol,
            norm_reading: opts.norm_reading,
            r29_literal_p: opts.r29_literal_p,
            z1: opts.z1.map(Into::into),
            z2: opts.z2.map(Into::into),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub evaluated: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub verified_failures: usize,
    pub report_only_failures: usize,
}

impl Summary {
    pub fn add(&mut self, verdict: Verdict, confidence: Confidence) {
        self.evaluated += 1;
        match verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Skipped => self.skipped += 1,
            Verdict::Fail => {
                self.fail += 1;
                match confidence {
                    Confidence::Verified => self.verified_failures += 1,
                    Confidence::ReportOnly => self.report_only_failures += 1,
                }
            }
        }
    }
}

/// One relation on one instance, with the witness given by reference.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeRow {
    pub relation: String,
    pub kind: Kind,
    pub confidence: Confidence,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub non_member: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl OutcomeRow {
    pub fn new(out: &CheckOutcome, label: &str, witness: Option<String>) -> Self {
        Self {
            relation: label.to_string(),
            kind: out.kind,
            confidence: out.confidence,
            verdict: out.verdict,
            clause: out.clause.clone(),
            lhs: out.lhs,
            rhs: out.rhs,
            slack: out.slack,
            tolerance: out.tolerance,
            reason: out.reason.clone(),
            missing: out.missing.clone(),
            non_member: out.non_member.clone(),
            witness,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckConfig {
    #[serde(flatten)]
    pub eval: EvalConfig,
    pub relations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub config: CheckConfig,
    pub outcomes: Vec<OutcomeRow>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzConfig {
    pub profile: String,
    pub count: usize,
    pub seed: u64,
    pub max_shrink: usize,
    #[serde(flatten)]
    pub eval: EvalConfig,
    pub relations: Vec<String>,
    /// Relations also run under the plain norm reading, report-only.
    pub plain_variants: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub injected_fault: Option<String>,
}

/// Where a relation came closest to failing.
#[derive(Debug, Clone, Serialize)]
pub struct Worst {
    pub seed: u64,
    /// Violation in units of the tolerance; above 1 means failing.
    pub ratio: f64,
    pub clause: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationTally {
    pub relation: String,
    pub confidence: Confidence,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst: Option<Worst>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub relation: String,
    pub seed: u64,
    pub index: usize,
    pub dim: usize,
    pub rank: usize,
    pub clause: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub tolerance: f64,
    /// File name inside the corpus directory.
    pub witness: String,
    pub witness_dim: usize,
    pub shrink_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FuzzReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: FuzzConfig,
    pub relations: Vec<RelationTally>,
    pub failures: Vec<Failure>,
    pub report_only: Vec<Failure>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ComputeValue {
    Real(f64),
    Bool(bool),
    Matrix(Vec<Vec<Complex>>),
}

#[derive(Debug, Clone, Serialize)]
pub struct ComputeReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub operator: String,
    pub quantity: &'static str,
    pub member: bool,
    pub value: ComputeValue,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangePoint {
    pub theta: f64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RangeReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub operator: String,
    pub w_a: f64,
    pub c_a: f64,
    pub points: Vec<RangePoint>,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}
