use crate::gates::TwoBitGate;

use super::{Circuit, CircuitOp};

/// Rewrites every long-range two-bit gate into nearest-neighbour form.
///
/// For a gate on bits `i` and `j` with `|i - j| > 1`, bit `j` is walked next
/// to `i` with a chain of SWAPs, the gate runs on the adjacent pair, and the
/// chain is undone so every bit ends where it started. That costs
/// `2 (|i - j| - 1)` extra two-bit gates per long-range gate.
pub fn route_nearest_neighbor(circuit: &Circuit) -> Circuit {
    let swap = TwoBitGate::swap();
    let mut ops = Vec::with_capacity(circuit.ops.len());
    for op in &circuit.ops {
        let CircuitOp::TwoBit { first, second, gate } = op else {
            ops.push(op.clone());
            continue;
        };
        let (i, j) = (*first, *second);
        if i.abs_diff(j) <= 1 {
            ops.push(op.clone());
            continue;
        }
        // Cuts crossed while moving bit j toward bit i, in order.
        let cuts: Vec<usize> = if j > i { (i + 1..j).rev().collect() } else { (j..i - 1).collect() };
        let parked = if j > i { i + 1 } else { i - 1 };
        let hop = |c: usize| CircuitOp::TwoBit { first: c, second: c + 1, gate: swap.clone() };
        ops.extend(cuts.iter().map(|&c| hop(c)));
        ops.push(CircuitOp::TwoBit { first: i, second: parked, gate: gate.clone() });
        ops.extend(cuts.iter().rev().map(|&c| hop(c)));
    }
    circuit.with_ops(ops)
}
