//! Preimage search and exact solution counting.
//!
//! With every input uniform, `P(y) * 2^{n_in}` is the number of inputs `x`
//! with `f(x) = y`. The search pins input bits one at a time, always trying
//! 0 first, and keeps a branch when the solutions left under the pinned
//! prefix, `N_k = P(y) * 2^{n_in - k}`, are at least one. Since `N_k` is an
//! integer in exact arithmetic, the test is `N_k >= 0.5`.

use crate::circuit::{execute, Circuit};
use crate::error::{Error, Result};
use crate::gates::SvdConfig;
use crate::oracle::check_target;
use crate::state::BitAssignment;

/// Rounded values further than this from an integer are rejected.
pub const INTEGRALITY_SLACK: f64 = 0.25;

/// `P(y) * 2^{n_in}` together with its rounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountMeasurement {
    pub probability: f64,
    pub scaled: f64,
    pub count: u64,
    /// `|scaled - count|`.
    pub residual: f64,
}

/// One bit-fixing step. Step 0 is the initial all-uniform count.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchStep {
    pub step: usize,
    /// Input bit pinned at this step (`None` for step 0).
    pub bit: Option<usize>,
    /// Inputs pinned after this step.
    pub fixed: BitAssignment,
    /// `P(y)` with the bit pinned to 0 (or unpinned at step 0).
    pub probability_zero: f64,
    /// `P(y)` with the bit pinned to 1, when that branch was run.
    pub probability_one: Option<f64>,
    /// `2^{k - n_in}`, the smallest `P(y)` of a surviving branch.
    pub threshold: f64,
    /// `N_k` of the branch taken.
    pub remaining: f64,
    pub branch: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// One input with `f(x) = y`, or `None` when there is none.
    pub witness: Option<BitAssignment>,
    pub count: u64,
    pub trace: Vec<SearchStep>,
    /// Full circuit executions performed.
    pub executions: usize,
}

impl SearchOutcome {
    pub fn is_satisfiable(&self) -> bool {
        self.witness.is_some()
    }
}

fn target_probability(
    circuit: &Circuit,
    fixed: &BitAssignment,
    target: &BitAssignment,
    cfg: &SvdConfig,
) -> Result<f64> {
    execute(circuit, fixed, cfg)?.probability(target)
}

fn scale(probability: f64, exponent: usize) -> f64 {
    probability * 2f64.powi(exponent as i32)
}

/// Executes once with all inputs uniform and rounds `P(y) * 2^{n_in}`.
pub fn measure_count(circuit: &Circuit, target: &BitAssignment, cfg: &SvdConfig) -> Result<CountMeasurement> {
    check_target(circuit, target)?;
    let probability = target_probability(circuit, &BitAssignment::new(), target, cfg)?;
    rounded(probability, circuit.n_inputs(), cfg)
}

fn rounded(probability: f64, n_in: usize, cfg: &SvdConfig) -> Result<CountMeasurement> {
    let scaled = scale(probability, n_in);
    let nearest = scaled.round().max(0.0);
    let residual = (scaled - nearest).abs();
    if !cfg.is_lossy() && (residual.is_nan() || residual >= INTEGRALITY_SLACK) {
        return Err(Error::IntegralityViolation { scaled });
    }
    Ok(CountMeasurement { probability, scaled, count: nearest as u64, residual })
}

/// Number of inputs `x` with `f(x) = target`.
pub fn count_solutions(circuit: &Circuit, target: &BitAssignment, cfg: &SvdConfig) -> Result<u64> {
    measure_count(circuit, target, cfg).map(|m| m.count)
}

/// Finds the lexicographically smallest input (in `input_bits` order) with
/// `f(x) = target`, along with the total solution count.
pub fn search_preimage(circuit: &Circuit, target: &BitAssignment, cfg: &SvdConfig) -> Result<SearchOutcome> {
    check_target(circuit, target)?;
    if let Some(step) = circuit.first_probabilistic_op() {
        return Err(Error::NonDeterministic(format!("op {} is a probabilistic gate", step + 1)));
    }
    let inputs = circuit.input_bits();
    let n_in = inputs.len();

    let mut fixed = BitAssignment::new();
    let p = target_probability(circuit, &fixed, target, cfg)?;
    let initial = rounded(p, n_in, cfg)?;
    let mut executions = 1;
    let mut trace = vec![SearchStep {
        step: 0,
        bit: None,
        fixed: fixed.clone(),
        probability_zero: p,
        probability_one: None,
        threshold: scale(1.0, 0) / scale(1.0, n_in),
        remaining: initial.scaled,
        branch: None,
    }];
    if initial.count == 0 {
        return Ok(SearchOutcome { witness: None, count: 0, trace, executions });
    }

    let mut last_probability = p;
    for (k, &bit) in inputs.iter().enumerate().map(|(i, b)| (i + 1, b)) {
        let left = n_in - k;
        fixed.set(bit, false);
        let p0 = target_probability(circuit, &fixed, target, cfg)?;
        executions += 1;
        let n0 = scale(p0, left);
        let (branch, p1, remaining, p_taken) = if n0 >= 0.5 {
            (false, None, n0, p0)
        } else {
            fixed.set(bit, true);
            let p1 = target_probability(circuit, &fixed, target, cfg)?;
            executions += 1;
            let n1 = scale(p1, left);
            if n1.is_nan() || n1 < 0.5 {
                return Err(Error::BranchFailure { step: k, bit, zero: n0, one: n1 });
            }
            (true, Some(p1), n1, p1)
        };
        last_probability = p_taken;
        trace.push(SearchStep {
            step: k,
            bit: Some(bit),
            fixed: fixed.clone(),
            probability_zero: p0,
            probability_one: p1,
            threshold: 1.0 / scale(1.0, left),
            remaining,
            branch: Some(branch),
        });
    }

    // The last surviving execution had every input pinned, so it is a
    // deterministic evaluation of f at the witness.
    if (last_probability - 1.0).abs() > 1e-6 {
        return Err(Error::WitnessCheck { probability: last_probability });
    }
    Ok(SearchOutcome { witness: Some(fixed), count: initial.count, trace, executions })
}
