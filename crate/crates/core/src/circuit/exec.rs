use crate::error::{Error, Result};
use crate::gates::SvdConfig;
use crate::state::{BitAssignment, MpsState};

use super::{Circuit, CircuitOp};

/// Runs a routed circuit from the product state in which unfixed inputs are
/// uniform, `fixed_inputs` are pinned, and every other bit starts at 0.
pub fn execute(circuit: &Circuit, fixed_inputs: &BitAssignment, cfg: &SvdConfig) -> Result<MpsState> {
    run(circuit, fixed_inputs, cfg, false, |_, _, _| Ok(()))
}

/// Like [`execute`], with the height profile logging one row per op (plus an
/// `init` row when the circuit has any ops).
pub fn execute_logged(circuit: &Circuit, fixed_inputs: &BitAssignment, cfg: &SvdConfig) -> Result<MpsState> {
    run(circuit, fixed_inputs, cfg, true, |_, _, _| Ok(()))
}

/// Like [`execute`], calling `observe(step, op, state)` after every op.
/// An error from the observer aborts the run.
pub fn execute_observed<F>(
    circuit: &Circuit,
    fixed_inputs: &BitAssignment,
    cfg: &SvdConfig,
    observe: F,
) -> Result<MpsState>
where
    F: FnMut(usize, &CircuitOp, &MpsState) -> Result<()>,
{
    run(circuit, fixed_inputs, cfg, false, observe)
}

fn run<F>(
    circuit: &Circuit,
    fixed_inputs: &BitAssignment,
    cfg: &SvdConfig,
    log: bool,
    mut observe: F,
) -> Result<MpsState>
where
    F: FnMut(usize, &CircuitOp, &MpsState) -> Result<()>,
{
    if let Some(bad) = fixed_inputs.indices().find(|b| !circuit.input_bits.contains(b)) {
        return Err(Error::InvalidAssignment(format!("bit {bad} is not an input bit")));
    }
    let mut init = fixed_inputs.clone();
    for bit in 1..=circuit.n_declared {
        if !circuit.input_bits.contains(&bit) {
            init.set(bit, false);
        }
    }
    let mut state = MpsState::new(circuit.n_declared, &init)?;
    if cfg.is_lossy() {
        state.approximate = true;
    }
    if log && !circuit.ops.is_empty() {
        state.profile.set_logging(true);
        state.profile.record("init");
    }

    for (step, op) in circuit.ops.iter().enumerate() {
        match op {
            CircuitOp::OneBit { index, gate } => state.apply_one_bit(*index, gate)?,
            CircuitOp::TwoBit { first, second, gate } => {
                if *second == first + 1 {
                    state.apply_two_bit(*first, gate, cfg)?;
                } else if *first == second + 1 {
                    state.apply_two_bit(*second, &gate.mirrored(), cfg)?;
                } else {
                    return Err(Error::NotAdjacent { first: *first, second: *second });
                }
            }
            CircuitOp::Insert { position, value } => state.insert_bit(*position, *value)?,
            CircuitOp::Remove { index } => {
                state.remove_bit(*index)?;
                state.recompress_sweeps(cfg)?;
            }
            CircuitOp::Sweep => state.recompress_sweeps(cfg)?,
        }
        state.profile.record(op.to_string());
        observe(step, op, &state)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, route_nearest_neighbor};
    use approx::assert_abs_diff_eq;

    const NAND: &str = "bits 2\ninput 1 2\ngate CNAND 1 2\noutput 2\n";

    fn assign(s: &str) -> BitAssignment {
        s.parse().unwrap()
    }

    #[test]
    fn nand_uniform() {
        let c = parse_circuit(NAND).unwrap();
        let s = execute(&c, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        assert_abs_diff_eq!(s.probability(&assign("2=1")).unwrap(), 0.75, epsilon = 1e-12);
        assert_eq!(s.gate_count(), 1);
        assert_eq!(s.peak_bond_dim(), 2);
    }

    #[test]
    fn nand_fixed_inputs() {
        let c = parse_circuit(NAND).unwrap();
        let s = execute(&c, &assign("1=1,2=1"), &SvdConfig::default()).unwrap();
        assert_abs_diff_eq!(s.probability(&assign("2=0")).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn parity_chain_of_four() {
        let c =
            parse_circuit("bits 4\ninput 1 2 3 4\ngate CXOR 1 2\ngate CXOR 2 3\ngate CXOR 3 4\noutput 4\n").unwrap();
        let s = execute(&c, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        assert_abs_diff_eq!(s.probability(&assign("4=0")).unwrap(), 0.5, epsilon = 1e-12);
        // a reversible circuit keeps the uniform distribution a product state
        assert_eq!(s.peak_bond_dim(), 1);
    }

    #[test]
    fn ancillas_start_at_zero() {
        let c = parse_circuit("bits 3\ninput 2\noutput 1 2 3\n").unwrap();
        let s = execute(&c, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        let d = s.full_distribution().unwrap();
        assert_eq!(d, vec![0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_unrouted_and_foreign_fixes() {
        let c = parse_circuit("bits 3\ninput 1 2\ngate CXOR 1 3\n").unwrap();
        assert!(matches!(
            execute(&c, &BitAssignment::new(), &SvdConfig::default()),
            Err(Error::NotAdjacent { first: 1, second: 3 })
        ));
        let r = route_nearest_neighbor(&c);
        assert!(execute(&r, &assign("3=1"), &SvdConfig::default()).is_err());
        let s = execute(&r, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        assert_eq!(s.gate_count(), 3);
    }

    #[test]
    fn mirrored_operands() {
        // CNAND with a = bit 2, b = bit 1: bit 1 becomes NAND, bit 2 untouched
        let c = parse_circuit("bits 2\ninput 1 2\ngate CNAND 2 1\noutput 1\n").unwrap();
        let s = execute(&c, &assign("1=0,2=1"), &SvdConfig::default()).unwrap();
        assert_abs_diff_eq!(s.probability(&assign("1=1,2=1")).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn remove_triggers_sweeps() {
        let c = parse_circuit("bits 3\ninput 1 2 3\ngate CNAND 1 2\ngate CAND 2 3\nremove 2\noutput 2\n").unwrap();
        let s = execute(&c, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        assert!(!s.profile().is_stale());
        // 2 gates, then 2 * (2 - 1) sweep identities on the 2 remaining bits
        assert_eq!(s.gate_count(), 4);
        assert!(s.profile().check_bounds().passed);
    }

    #[test]
    fn logging_rows() {
        let c = parse_circuit(NAND).unwrap();
        let s = execute_logged(&c, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        let log = s.profile().log();
        assert_eq!(log.len(), 2);
        assert_eq!(log[0].op, "init");
        assert_eq!(log[1].bond_dims, vec![1, 2, 1]);

        let empty = parse_circuit("bits 2\n").unwrap();
        let s = execute_logged(&empty, &BitAssignment::new(), &SvdConfig::default()).unwrap();
        assert!(s.profile().log().is_empty());
    }
}
