//! Brute-force reference: the full `2^n` probability vector pushed through a
//! circuit op by op, and solution counting by direct evaluation of every
//! input assignment. Both work on unrouted circuits.

use rayon::prelude::*;

use crate::circuit::{Circuit, CircuitOp};
use crate::error::{Error, Result};
use crate::gates::{OneBitGate, TwoBitGate};
use crate::state::BitAssignment;

/// Largest chain width [`oracle_execute`] will materialise.
pub const ORACLE_MAX_BITS: usize = 20;

/// Probabilities of all `2^n` strings; bit 1 is the most significant bit of
/// the index.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl DenseDistribution {
    /// Product distribution: pinned bits from `fixed`, others uniform.
    pub fn product(n: usize, fixed: &BitAssignment) -> Result<Self> {
        if n == 0 || n > ORACLE_MAX_BITS {
            return Err(Error::OracleCap { what: "distribution", n, cap: ORACLE_MAX_BITS });
        }
        let mut probs = vec![1.0; 1 << n];
        for j in 1..=n {
            let shift = n - j;
            for (x, p) in probs.iter_mut().enumerate() {
                let bit = (x >> shift) & 1 == 1;
                *p *= match fixed.get(j) {
                    Some(v) if v == bit => 1.0,
                    Some(_) => 0.0,
                    None => 0.5,
                };
            }
        }
        Ok(Self { n, probs })
    }

    pub fn n_bits(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn mask(&self, bit: usize) -> usize {
        1 << (self.n - bit)
    }

    /// Marginal probability of `constraint`.
    pub fn probability(&self, constraint: &BitAssignment) -> f64 {
        let (mut care, mut want) = (0usize, 0usize);
        for (bit, v) in constraint.iter() {
            care |= self.mask(bit);
            if v {
                want |= self.mask(bit);
            }
        }
        self.probs.iter().enumerate().filter(|(x, _)| x & care == want).map(|(_, p)| p).sum()
    }

    fn apply_one_bit(&mut self, bit: usize, gate: &OneBitGate) {
        let m = self.mask(bit);
        for x in (0..self.probs.len()).filter(|x| x & m == 0) {
            let (p0, p1) = (self.probs[x], self.probs[x | m]);
            self.probs[x] = gate.transfer(false, false) * p0 + gate.transfer(false, true) * p1;
            self.probs[x | m] = gate.transfer(true, false) * p0 + gate.transfer(true, true) * p1;
        }
    }

    fn apply_two_bit(&mut self, first: usize, second: usize, gate: &TwoBitGate) {
        let (ma, mb) = (self.mask(first), self.mask(second));
        let mut out = vec![0.0; self.probs.len()];
        for (x, &p) in self.probs.iter().enumerate() {
            let (a, b) = gate.apply(x & ma != 0, x & mb != 0);
            let mut y = x & !(ma | mb);
            if a {
                y |= ma;
            }
            if b {
                y |= mb;
            }
            out[y] += p;
        }
        self.probs = out;
    }

    fn insert(&mut self, position: usize, value: bool) {
        // old index = high (bits 1..position) | low (the rest)
        let low_bits = self.n - position;
        let low_mask = (1usize << low_bits) - 1;
        let mut out = vec![0.0; self.probs.len() * 2];
        for (x, &p) in self.probs.iter().enumerate() {
            let y = ((x & !low_mask) << 1) | (usize::from(value) << low_bits) | (x & low_mask);
            out[y] = p;
        }
        self.n += 1;
        self.probs = out;
    }

    fn remove(&mut self, bit: usize) {
        let low_bits = self.n - bit;
        let low_mask = (1usize << low_bits) - 1;
        let mut out = vec![0.0; self.probs.len() / 2];
        for (x, &p) in self.probs.iter().enumerate() {
            let y = ((x >> (low_bits + 1)) << low_bits) | (x & low_mask);
            out[y] += p;
        }
        self.n -= 1;
        self.probs = out;
    }
}

/// Initial assignment used by both simulators: ancillas 0, `fixed` pinned.
fn initial_fixes(circuit: &Circuit, fixed_inputs: &BitAssignment) -> Result<BitAssignment> {
    if let Some(bad) = fixed_inputs.indices().find(|b| !circuit.input_bits().contains(b)) {
        return Err(Error::InvalidAssignment(format!("bit {bad} is not an input bit")));
    }
    let mut init = fixed_inputs.clone();
    for bit in (1..=circuit.n_declared()).filter(|b| !circuit.input_bits().contains(b)) {
        init.set(bit, false);
    }
    Ok(init)
}

/// Exact distribution after running `circuit` (routed or not).
pub fn oracle_execute(circuit: &Circuit, fixed_inputs: &BitAssignment) -> Result<DenseDistribution> {
    let width = circuit.max_width();
    if width > ORACLE_MAX_BITS {
        return Err(Error::OracleCap { what: "circuit", n: width, cap: ORACLE_MAX_BITS });
    }
    let mut dist = DenseDistribution::product(circuit.n_declared(), &initial_fixes(circuit, fixed_inputs)?)?;
    for op in circuit.ops() {
        match op {
            CircuitOp::OneBit { index, gate } => dist.apply_one_bit(*index, gate),
            CircuitOp::TwoBit { first, second, gate } => dist.apply_two_bit(*first, *second, gate),
            CircuitOp::Insert { position, value } => dist.insert(*position, *value),
            CircuitOp::Remove { index } => dist.remove(*index),
            CircuitOp::Sweep => {}
        }
    }
    Ok(dist)
}

/// Final bit values of a deterministic circuit on one complete input
/// assignment. Non-input bits start at 0.
pub fn evaluate_deterministic(circuit: &Circuit, inputs: &BitAssignment) -> Result<Vec<bool>> {
    if let Some(step) = circuit.first_probabilistic_op() {
        return Err(Error::NonDeterministic(format!("op {} is a probabilistic gate", step + 1)));
    }
    let init = initial_fixes(circuit, inputs)?;
    if init.len() != circuit.n_declared() {
        return Err(Error::InvalidAssignment("every input bit needs a value".into()));
    }
    Ok(run_bits(circuit, init.iter().map(|(_, v)| v).collect()))
}

fn run_bits(circuit: &Circuit, mut bits: Vec<bool>) -> Vec<bool> {
    for op in circuit.ops() {
        match op {
            CircuitOp::OneBit { index, gate } => {
                let b = &mut bits[index - 1];
                *b = gate.eval(*b).expect("checked deterministic");
            }
            CircuitOp::TwoBit { first, second, gate } => {
                let (a, b) = gate.apply(bits[first - 1], bits[second - 1]);
                bits[first - 1] = a;
                bits[second - 1] = b;
            }
            CircuitOp::Insert { position, value } => bits.insert(*position, *value),
            CircuitOp::Remove { index } => {
                bits.remove(index - 1);
            }
            CircuitOp::Sweep => {}
        }
    }
    bits
}

/// Number of input assignments whose outputs equal `target`, by exhaustive
/// deterministic evaluation.
pub fn oracle_count(circuit: &Circuit, target: &BitAssignment) -> Result<u64> {
    oracle_count_with_prefix(circuit, &BitAssignment::new(), target)
}

/// [`oracle_count`] restricted to inputs that agree with `fixed_inputs`.
pub fn oracle_count_with_prefix(
    circuit: &Circuit,
    fixed_inputs: &BitAssignment,
    target: &BitAssignment,
) -> Result<u64> {
    if let Some(step) = circuit.first_probabilistic_op() {
        return Err(Error::NonDeterministic(format!("op {} is a probabilistic gate", step + 1)));
    }
    let n_in = circuit.n_inputs();
    if n_in > ORACLE_MAX_BITS {
        return Err(Error::OracleCap { what: "input register", n: n_in, cap: ORACLE_MAX_BITS });
    }
    check_target(circuit, target)?;
    let base = initial_fixes(circuit, fixed_inputs)?;
    let inputs = circuit.input_bits();
    let wanted: Vec<(usize, bool)> = target.iter().collect();

    let count = (0u64..1 << n_in)
        .into_par_iter()
        .filter(|&x| {
            let mut bits = vec![false; circuit.n_declared()];
            for (k, &bit) in inputs.iter().enumerate() {
                bits[bit - 1] = (x >> (n_in - 1 - k)) & 1 == 1;
            }
            if base.iter().any(|(bit, v)| bits[bit - 1] != v) {
                return false;
            }
            let out = run_bits(circuit, bits);
            wanted.iter().all(|&(bit, v)| out[bit - 1] == v)
        })
        .count();
    Ok(count as u64)
}

pub(crate) fn check_target(circuit: &Circuit, target: &BitAssignment) -> Result<()> {
    let mut outs: Vec<usize> = circuit.output_bits().to_vec();
    outs.sort_unstable();
    if !target.indices().eq(outs.iter().copied()) {
        return Err(Error::TargetMismatch(format!(
            "{{{target}}} must assign exactly the output bits {:?}",
            circuit.output_bits()
        )));
    }
    Ok(())
}
