use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use matcomp::{
    evaluate_deterministic, execute, execute_logged, measure_count, oracle_execute, parse_circuit,
    route_nearest_neighbor, search_preimage, BitAssignment, Circuit, Error, MpsState, SiteMatrices, SvdConfig,
};
use serde::Serialize;

use crate::report::{
    CircuitInfo, ConfigEcho, CountCheck, CountReport, DistributionCheck, Marginal, RunReport, SearchReport, TraceStep,
    VerifyReport,
};
use crate::Options;

/// Entrywise agreement required by `verify`.
const VERIFY_TOLERANCE: f64 = 1e-9;
/// `all-outputs` refuses registers wider than this.
const MAX_JOINT_BITS: usize = 16;
const VERIFY_FAILED: u8 = 3;

#[derive(Debug)]
pub enum Failure {
    /// Unreadable file, malformed circuit or bad bit specification.
    Input(String),
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Runtime(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(msg) => f.write_str(msg),
            Failure::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidAssignment(_) | Error::TargetMismatch(_) | Error::Parse(_) => Failure::Input(e.to_string()),
            e => Failure::Runtime(e),
        }
    }
}

type Outcome = Result<ExitCode, Failure>;

struct Loaded {
    original: Circuit,
    routed: Circuit,
    info: CircuitInfo,
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
    let original = parse_circuit(&text).map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
    let routed = route_nearest_neighbor(&original);
    let info = CircuitInfo::new(&shown, &original, &routed);
    Ok(Loaded { original, routed, info })
}

fn config(opts: &Options) -> Result<(SvdConfig, ConfigEcho), Failure> {
    let cfg = SvdConfig::new(opts.rank_tol, opts.max_rank).map_err(|e| Failure::Input(e.to_string()))?;
    Ok((cfg, ConfigEcho { rank_tol: opts.rank_tol, max_rank: opts.max_rank.map(|r| r.get()) }))
}

fn spec(text: &str, width: usize) -> Result<BitAssignment, Failure> {
    let a: BitAssignment = text.parse().map_err(|e: Error| Failure::Input(e.to_string()))?;
    if let Some(bad) = a.indices().find(|&b| b == 0 || b > width) {
        return Err(Failure::Input(format!("bit {bad} is outside the circuit's {width} final bits")));
    }
    Ok(a)
}

fn timing(opts: &Options, start: Instant) -> Option<f64> {
    (!opts.no_timing).then(|| start.elapsed().as_secs_f64())
}

fn emit<T: Serialize>(report: &T) -> Result<(), Failure> {
    let mut out = serde_json::to_string_pretty(report).expect("reports serialize");
    out.push('\n');
    std::io::stdout().write_all(out.as_bytes()).map_err(|e| Failure::Input(format!("writing output: {e}")))
}

fn register_row(bits: &[usize], k: usize) -> String {
    let m = bits.len();
    bits.iter().enumerate().map(|(i, b)| format!("{b}={}", (k >> (m - 1 - i)) & 1)).collect::<Vec<_>>().join(",")
}

pub fn run(path: &Path, marginal: &str, opts: &Options) -> Outcome {
    let c = load(path)?;
    let (cfg, echo) = config(opts)?;
    let start = Instant::now();
    let state = execute(&c.routed, &BitAssignment::new(), &cfg)?;

    let marginals = if marginal.trim() == "all-outputs" {
        let outputs = c.original.output_bits();
        if outputs.len() > MAX_JOINT_BITS {
            return Err(Failure::Input(format!(
                "all-outputs over {} bits is too large; pass an explicit --marginal",
                outputs.len()
            )));
        }
        if outputs.is_empty() {
            vec![Marginal { constraint: String::new(), probability: state.normalization()? }]
        } else {
            let joint = state.joint_distribution(outputs)?;
            joint
                .iter()
                .enumerate()
                .map(|(k, &p)| Marginal { constraint: register_row(outputs, k), probability: p })
                .collect()
        }
    } else {
        let constraint = spec(marginal, c.original.final_width())?;
        vec![Marginal { constraint: constraint.to_string(), probability: state.probability(&constraint)? }]
    };

    let report = RunReport {
        circuit: c.info,
        config: echo,
        marginal_spec: marginal.to_string(),
        marginals,
        normalization: state.normalization()?,
        peak_bond_dim: state.peak_bond_dim(),
        final_bond_dims: state.bond_dims(),
        approximate: state.is_approximate(),
        bounds: state.profile().check_bounds(),
        wall_time_s: timing(opts, start),
    };
    emit(&report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn search(path: &Path, target: &str, opts: &Options) -> Outcome {
    let c = load(path)?;
    let (cfg, echo) = config(opts)?;
    let target = spec(target, c.original.final_width())?;
    let start = Instant::now();
    let out = search_preimage(&c.routed, &target, &cfg)?;
    let inputs = c.original.input_bits();
    let report = SearchReport {
        circuit: c.info,
        config: echo,
        target: target.to_string(),
        status: if out.is_satisfiable() { "satisfiable" } else { "unsatisfiable" },
        witness: out.witness.as_ref().and_then(|w| w.bit_string(inputs)),
        witness_assignment: out.witness.as_ref().map(|w| w.to_string()),
        count: out.count,
        executions: out.executions,
        trace: out.trace.iter().map(TraceStep::from).collect(),
        wall_time_s: timing(opts, start),
    };
    emit(&report)?;
    Ok(ExitCode::SUCCESS)
}

pub fn count(path: &Path, target: &str, opts: &Options) -> Outcome {
    let c = load(path)?;
    let (cfg, echo) = config(opts)?;
    let target = spec(target, c.original.final_width())?;
    let start = Instant::now();
    let m = measure_count(&c.routed, &target, &cfg)?;
    let mut report = CountReport::new(c.info, echo, target.to_string(), &m);
    report.wall_time_s = timing(opts, start);
    emit(&report)?;
    Ok(ExitCode::SUCCESS)
}

fn corrupt(state: &mut MpsState, bit: usize) -> Result<(), Failure> {
    let site = state.site_mut(bit)?;
    *site = SiteMatrices::new(site.m0() * 2.0, site.m1().clone())?;
    Ok(())
}

/// Solution counts per output value, by evaluating every input.
fn brute_force_counts(circuit: &Circuit) -> Result<Vec<u64>, Failure> {
    let inputs = circuit.input_bits();
    let outputs = circuit.output_bits();
    let n_in = inputs.len();
    let mut counts = vec![0u64; 1 << outputs.len()];
    for x in 0u64..1 << n_in {
        let values: Vec<bool> = (0..n_in).map(|k| (x >> (n_in - 1 - k)) & 1 == 1).collect();
        let bits = evaluate_deterministic(circuit, &BitAssignment::zip(inputs, &values)?)?;
        let y = outputs.iter().fold(0usize, |acc, &o| 2 * acc + usize::from(bits[o - 1]));
        counts[y] += 1;
    }
    Ok(counts)
}

pub fn verify(path: &Path, corrupt_site: Option<usize>, opts: &Options) -> Outcome {
    let c = load(path)?;
    let (cfg, echo) = config(opts)?;
    let cap = opts.oracle_cap as usize;
    let start = Instant::now();
    let mut warnings = Vec::new();
    let mut distribution =
        DistributionCheck { checked: false, entries: 0, max_abs_diff: None, tolerance: VERIFY_TOLERANCE, passed: true };
    let mut counts = CountCheck { checked: false, targets: 0, mismatches: Vec::new(), passed: true };

    if cfg.is_lossy() {
        warnings.push("--max-rank truncates the simulation, so it is not compared against brute force".to_string());
    } else {
        let mut state = execute(&c.routed, &BitAssignment::new(), &cfg)?;
        if let Some(bit) = corrupt_site {
            corrupt(&mut state, bit)?;
        }

        let width = c.original.max_width();
        if width > cap {
            warnings
                .push(format!("distribution not compared: the circuit reaches {width} bits, above --oracle-cap {cap}"));
        } else {
            let mps = state.full_distribution()?;
            let dense = oracle_execute(&c.original, &BitAssignment::new())?;
            let diff = mps.iter().zip(dense.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            distribution.checked = true;
            distribution.entries = mps.len();
            distribution.max_abs_diff = Some(diff);
            distribution.passed = mps.len() == dense.probs().len() && diff <= VERIFY_TOLERANCE;
        }

        let outputs = c.original.output_bits();
        let n_in = c.original.n_inputs();
        if !c.original.is_deterministic() {
            warnings.push("counts not compared: the circuit has probabilistic gates".to_string());
        } else if outputs.is_empty() {
            warnings.push("counts not compared: the circuit declares no outputs".to_string());
        } else if n_in > cap || outputs.len() > cap {
            warnings.push(format!("counts not compared: register widths exceed --oracle-cap {cap}"));
        } else {
            let exact = brute_force_counts(&c.original)?;
            let joint = state.joint_distribution(outputs)?;
            let scale = (1u64 << n_in) as f64;
            counts.checked = true;
            counts.targets = exact.len();
            for (y, (&p, &want)) in joint.iter().zip(&exact).enumerate() {
                let got = (p * scale).round();
                if got != want as f64 {
                    counts
                        .mismatches
                        .push(format!("{}: simulated {got}, brute force {want}", register_row(outputs, y)));
                }
            }
            counts.passed = counts.mismatches.is_empty();
        }
    }

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let passed = distribution.passed && counts.passed;
    let status = match (passed, distribution.checked || counts.checked) {
        (false, _) => "fail",
        (true, true) => "pass",
        (true, false) => "skipped",
    };
    let report = VerifyReport {
        circuit: c.info,
        config: echo,
        status,
        distribution,
        counts,
        warnings,
        wall_time_s: timing(opts, start),
    };
    emit(&report)?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(VERIFY_FAILED) })
}

pub fn heights(path: &Path, opts: &Options) -> Outcome {
    let c = load(path)?;
    let (cfg, _) = config(opts)?;
    let state = execute_logged(&c.routed, &BitAssignment::new(), &cfg)?;
    std::io::stdout()
        .write_all(state.profile().export_csv().as_bytes())
        .map_err(|e| Failure::Input(format!("writing output: {e}")))?;
    Ok(ExitCode::SUCCESS)
}
