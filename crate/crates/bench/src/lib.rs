//! Workloads shared by the criterion benchmarks in `benches/`.

use matcomp::{execute, route_nearest_neighbor, BitAssignment, Circuit, CircuitOp, MpsState, SvdConfig, TwoBitGate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn two_bit(c: &mut Circuit, name: &str, first: usize, second: usize) {
    let gate = TwoBitGate::builtin(name).expect("builtin gate");
    c.push(CircuitOp::TwoBit { first, second, gate }).expect("indices in range");
}

/// `x_1 xor ... xor x_n` accumulated onto bit `n` with a CXOR chain.
pub fn parity_chain(n: usize) -> Circuit {
    let mut c = Circuit::new(n).unwrap();
    c.set_inputs((1..=n).collect()).unwrap();
    for j in 1..n {
        two_bit(&mut c, "CXOR", j, j + 1);
    }
    c.set_outputs(vec![n]).unwrap();
    c
}

/// Nearest-neighbour random circuit on `n` bits, half of them inputs.
pub fn random_circuit(seed: u64, n: usize, gates: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n).unwrap();
    c.set_inputs((1..=n).step_by(2).collect()).unwrap();
    for _ in 0..gates {
        let j = rng.gen_range(1..n);
        let name = ["CXOR", "CNAND", "CAND", "COR", "CNOR", "SWAP"][rng.gen_range(0..6)];
        if rng.gen() {
            two_bit(&mut c, name, j, j + 1);
        } else {
            two_bit(&mut c, name, j + 1, j);
        }
    }
    c.set_outputs(vec![n]).unwrap();
    c
}

/// A `2k`-bit state whose middle bond has dimension `2^k`: input `i` is
/// copied onto bit `2k + 1 - i`.
pub fn rainbow_state(k: usize) -> MpsState {
    let n = 2 * k;
    let mut c = Circuit::new(n).unwrap();
    c.set_inputs((1..=k).collect()).unwrap();
    for i in 1..=k {
        two_bit(&mut c, "CXOR", i, n + 1 - i);
    }
    execute(&route_nearest_neighbor(&c), &BitAssignment::new(), &SvdConfig::default()).unwrap()
}
