//! JSON payloads. Field order is declaration order, so output is stable.

use matcomp::{BoundReport, Circuit, CountMeasurement, SearchStep};
use serde::Serialize;

#[derive(Serialize)]
pub struct CircuitInfo {
    pub path: String,
    pub n: usize,
    pub n_final: usize,
    pub n_in: usize,
    pub outputs: Vec<usize>,
    /// Two-bit gates after routing, SWAPs included.
    pub n_g: usize,
}

impl CircuitInfo {
    pub fn new(path: &str, original: &Circuit, routed: &Circuit) -> Self {
        Self {
            path: path.to_string(),
            n: original.n_declared(),
            n_final: original.final_width(),
            n_in: original.n_inputs(),
            outputs: original.output_bits().to_vec(),
            n_g: routed.two_bit_count(),
        }
    }
}

#[derive(Serialize)]
pub struct ConfigEcho {
    pub rank_tol: f64,
    pub max_rank: Option<usize>,
}

#[derive(Serialize)]
pub struct Marginal {
    pub constraint: String,
    pub probability: f64,
}

#[derive(Serialize)]
pub struct RunReport {
    pub circuit: CircuitInfo,
    pub config: ConfigEcho,
    pub marginal_spec: String,
    pub marginals: Vec<Marginal>,
    pub normalization: f64,
    pub peak_bond_dim: usize,
    pub final_bond_dims: Vec<usize>,
    pub approximate: bool,
    pub bounds: BoundReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub bit: Option<usize>,
    pub fixed: String,
    pub probability_zero: f64,
    pub probability_one: Option<f64>,
    pub threshold: f64,
    pub remaining: f64,
    pub branch: Option<u8>,
}

impl From<&SearchStep> for TraceStep {
    fn from(s: &SearchStep) -> Self {
        Self {
            step: s.step,
            bit: s.bit,
            fixed: s.fixed.to_string(),
            probability_zero: s.probability_zero,
            probability_one: s.probability_one,
            threshold: s.threshold,
            remaining: s.remaining,
            branch: s.branch.map(u8::from),
        }
    }
}

#[derive(Serialize)]
pub struct SearchReport {
    pub circuit: CircuitInfo,
    pub config: ConfigEcho,
    pub target: String,
    /// `satisfiable` or `unsatisfiable`.
    pub status: &'static str,
    /// Input values in input-bit order, e.g. `"011"`.
    pub witness: Option<String>,
    pub witness_assignment: Option<String>,
    pub count: u64,
    pub executions: usize,
    pub trace: Vec<TraceStep>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Serialize)]
pub struct CountReport {
    pub circuit: CircuitInfo,
    pub config: ConfigEcho,
    pub target: String,
    pub count: u64,
    pub probability: f64,
    pub scaled: f64,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl CountReport {
    pub fn new(circuit: CircuitInfo, config: ConfigEcho, target: String, m: &CountMeasurement) -> Self {
        Self {
            circuit,
            config,
            target,
            count: m.count,
            probability: m.probability,
            scaled: m.scaled,
            residual: m.residual,
            wall_time_s: None,
        }
    }
}

#[derive(Serialize)]
pub struct DistributionCheck {
    pub checked: bool,
    pub entries: usize,
    pub max_abs_diff: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct CountCheck {
    pub checked: bool,
    pub targets: usize,
    pub mismatches: Vec<String>,
    pub passed: bool,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub circuit: CircuitInfo,
    pub config: ConfigEcho,
    /// `pass`, `fail` or `skipped`.
    pub status: &'static str,
    pub distribution: DistributionCheck,
    pub counts: CountCheck,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}
