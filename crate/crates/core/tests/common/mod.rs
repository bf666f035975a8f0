#![allow(dead_code)]

use matcomp::{route_nearest_neighbor, BitAssignment, Circuit, CircuitOp, OneBitGate, TwoBitGate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const MAX_CORPUS_BITS: usize = 12;
pub const MAX_CORPUS_GATES: usize = 60;

/// A named circuit plus its nearest-neighbour form.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub circuit: Circuit,
    pub routed: Circuit,
}

impl Instance {
    pub fn new(name: impl Into<String>, circuit: Circuit) -> Self {
        let routed = route_nearest_neighbor(&circuit);
        Self { name: name.into(), circuit, routed }
    }

    /// Two-bit gates after routing.
    pub fn n_g(&self) -> usize {
        self.routed.two_bit_count()
    }
}

pub struct Builder {
    c: Circuit,
    next_ancilla: usize,
}

impl Builder {
    pub fn new(n: usize, inputs: &[usize]) -> Self {
        let mut c = Circuit::new(n).unwrap();
        c.set_inputs(inputs.to_vec()).unwrap();
        Self { c, next_ancilla: inputs.iter().copied().max().unwrap_or(0) + 1 }
    }

    pub fn g2(&mut self, gate: TwoBitGate, first: usize, second: usize) -> &mut Self {
        self.c.push(CircuitOp::TwoBit { first, second, gate }).unwrap();
        self
    }

    pub fn named2(&mut self, name: &str, first: usize, second: usize) -> &mut Self {
        self.g2(TwoBitGate::builtin(name).unwrap(), first, second)
    }

    pub fn g1(&mut self, gate: OneBitGate, index: usize) -> &mut Self {
        self.c.push(CircuitOp::OneBit { index, gate }).unwrap();
        self
    }

    pub fn op(&mut self, op: CircuitOp) -> &mut Self {
        self.c.push(op).unwrap();
        self
    }

    /// Writes NAND(a, b) into a fresh zeroed ancilla and returns its index.
    pub fn nand(&mut self, a: usize, b: usize) -> usize {
        let t = self.next_ancilla;
        self.next_ancilla += 1;
        self.nand_into(a, b, t)
    }

    /// Writes NAND(a, b) into the zeroed bit `t`.
    pub fn nand_into(&mut self, a: usize, b: usize, t: usize) -> usize {
        self.named2("CXOR", a, t).named2("CNAND", b, t);
        t
    }

    pub fn finish(&mut self, outputs: &[usize]) -> Circuit {
        let mut c = self.c.clone();
        c.set_outputs(outputs.to_vec()).unwrap();
        c
    }
}

pub fn nand() -> Circuit {
    Builder::new(2, &[1, 2]).named2("CNAND", 1, 2).finish(&[2])
}

pub fn parity_chain(n: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=n).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 1..n {
        b.named2("CXOR", i, i + 1);
    }
    b.finish(&[n])
}

/// Sum and carry from four NANDs plus an inverter (a NAND with itself).
pub fn half_adder_nand() -> Circuit {
    let mut b = Builder::new(7, &[1, 2]);
    let n1 = b.nand(1, 2);
    let n2 = b.nand(1, n1);
    let n3 = b.nand(2, n1);
    let s = b.nand(n2, n3);
    let t = b.next_ancilla;
    b.named2("CXOR", n1, t).named2("CNAND", n1, t);
    b.finish(&[s, t])
}

/// Full adder as the textbook nine-NAND network on a 12-bit register. Bits
/// are placed to keep routing short: inputs `a = 4`, `b = 1`, `c = 12`.
pub fn full_adder_nand() -> Circuit {
    let (a, b_in, c) = (4, 1, 12);
    let mut b = Builder::new(12, &[b_in, a, c]);
    let n1 = b.nand_into(a, b_in, 3);
    let n2 = b.nand_into(a, n1, 5);
    let n3 = b.nand_into(b_in, n1, 2);
    let x = b.nand_into(n2, n3, 6);
    let n5 = b.nand_into(x, c, 9);
    let n6 = b.nand_into(x, n5, 8);
    let n7 = b.nand_into(c, n5, 11);
    let sum = b.nand_into(n6, n7, 10);
    let cout = b.nand_into(n5, n1, 7);
    b.finish(&[sum, cout])
}

/// XOR out of three NANDs, written back over the first input.
pub fn xor_from_nands() -> Circuit {
    let mut b = Builder::new(5, &[1, 2]);
    let n1 = b.nand(1, 2);
    let n2 = b.nand(1, n1);
    let n3 = b.nand(2, n1);
    // reuse bit 1 as the output register
    b.g1(OneBitGate::RST, 1);
    b.named2("CXOR", n2, 1).named2("CNAND", n3, 1);
    b.finish(&[1])
}

/// `k`-digit ripple-carry adder laid out as `a_i b_i c_i` triples. After the
/// run `b_i` holds sum digit `i` and the last `c` the carry out.
pub fn ripple_adder(k: usize) -> Circuit {
    let n = 3 * k;
    let a = |i: usize| 3 * i + 1;
    let bb = |i: usize| 3 * i + 2;
    let c = |i: usize| 3 * i + 3;
    let inputs: Vec<usize> = (0..k).flat_map(|i| [a(i), bb(i)]).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 0..k {
        // c_i = a_i & b_i ; b_i = a_i ^ b_i
        b.named2("CXOR", a(i), c(i)).named2("CAND", bb(i), c(i)).named2("CXOR", a(i), bb(i));
        if i > 0 {
            let carry = c(i - 1);
            // a_i := b_i & carry, c_i |= a_i, b_i ^= carry
            b.g1(OneBitGate::RST, a(i));
            b.named2("CXOR", carry, a(i)).named2("CAND", bb(i), a(i)).named2("COR", a(i), c(i)).named2(
                "CXOR",
                carry,
                bb(i),
            );
        }
    }
    let mut outputs: Vec<usize> = (0..k).map(bb).collect();
    outputs.push(c(k - 1));
    b.finish(&outputs)
}

/// `b_{i+1} &= b_i` down the chain: the last bit is the AND of all.
pub fn and_chain(n: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=n).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 1..n {
        b.named2("CAND", i, i + 1);
    }
    b.finish(&[n])
}

pub fn or_chain(n: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=n).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 1..n {
        b.named2("COR", i, i + 1);
    }
    b.finish(&[n])
}

/// 2-bit equality test `[a1 a2] == [b1 b2]` via XNOR into the b bits.
pub fn equality2() -> Circuit {
    let mut b = Builder::new(5, &[1, 2, 3, 4]);
    b.named2("CXOR", 1, 3).named2("CXOR", 2, 4).named2("CNOR", 3, 4);
    b.g1(OneBitGate::RST, 5);
    b.named2("CXOR", 4, 5);
    b.finish(&[5])
}

/// Majority of three inputs written into an ancilla.
pub fn majority3() -> Circuit {
    let mut b = Builder::new(6, &[1, 2, 3]);
    // t4 = a & b ; t5 = b & c ; t6 = a & c ; out = t4 | t5 | t6 in bit 6
    b.named2("CXOR", 1, 4).named2("CAND", 2, 4);
    b.named2("CXOR", 2, 5).named2("CAND", 3, 5);
    b.named2("CXOR", 1, 6).named2("CAND", 3, 6);
    b.named2("COR", 4, 6).named2("COR", 5, 6);
    b.finish(&[6])
}

/// A function with a single preimage per output: bitwise NOT then a SWAP.
pub fn permutation(n: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=n).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 1..=n {
        b.g1(OneBitGate::NOT, i);
    }
    b.named2("SWAP", 1, n);
    b.finish(&inputs)
}

pub fn constant_one() -> Circuit {
    Builder::new(2, &[2]).g1(OneBitGate::SET, 1).finish(&[1])
}

pub fn identity(n: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=n).collect();
    Builder::new(n, &inputs).finish(&inputs)
}

/// NAND followed by a noisy channel on the output.
pub fn noisy_nand() -> Circuit {
    Builder::new(3, &[1, 2])
        .named2("CNAND", 1, 2)
        .g1(OneBitGate::new(0.9, 0.8).unwrap(), 2)
        .g1(OneBitGate::RAND, 3)
        .named2("CAND", 2, 3)
        .finish(&[3])
}

/// Custom truth-table gate computing `(a, a | b)`.
pub fn custom_table() -> Circuit {
    let gate = TwoBitGate::from_tables("SPREAD", [false, false, true, true], [false, true, true, true]);
    let mut c = Builder::new(4, &[1, 2, 3, 4])
        .g2(gate.clone(), 1, 2)
        .g2(gate.clone(), 3, 4)
        .g2(gate.clone(), 2, 3)
        .finish(&[2, 4]);
    c.define_gate(gate).unwrap();
    c
}

pub fn hand_written() -> Vec<Instance> {
    let mut out = vec![
        Instance::new("nand", nand()),
        Instance::new("half_adder_nand", half_adder_nand()),
        Instance::new("full_adder_nand", full_adder_nand()),
        Instance::new("xor_from_nands", xor_from_nands()),
        Instance::new("ripple_adder_1", ripple_adder(1)),
        Instance::new("ripple_adder_2", ripple_adder(2)),
        Instance::new("ripple_adder_3", ripple_adder(3)),
        Instance::new("ripple_adder_4", ripple_adder(4)),
        Instance::new("equality2", equality2()),
        Instance::new("majority3", majority3()),
        Instance::new("permutation_5", permutation(5)),
        Instance::new("constant_one", constant_one()),
        Instance::new("identity_3", identity(3)),
        Instance::new("noisy_nand", noisy_nand()),
        Instance::new("custom_table", custom_table()),
    ];
    for n in [2, 3, 4, 6, 8, 12] {
        out.push(Instance::new(format!("parity_{n}"), parity_chain(n)));
    }
    for n in [3, 5, 8] {
        out.push(Instance::new(format!("and_chain_{n}"), and_chain(n)));
        out.push(Instance::new(format!("or_chain_{n}"), or_chain(n)));
    }
    out
}

const RANDOM_TWO_BIT: [&str; 6] = ["CNAND", "CAND", "COR", "CXOR", "CNOR", "SWAP"];

/// Seeded random circuit on at most `max_bits` bits whose routed form has at
/// most `max_gates` two-bit gates. With `probabilistic`, some one-bit gates
/// are RAND or random stochastic gates.
pub fn random_circuit(seed: u64, max_bits: usize, max_gates: usize, probabilistic: bool) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_bits);
    let mut bits: Vec<usize> = (1..=n).collect();
    bits.shuffle(&mut rng);
    let n_in = rng.gen_range(1..=n);
    let mut inputs = bits[..n_in].to_vec();
    inputs.sort_unstable();

    let mut c = Circuit::new(n).unwrap();
    c.set_inputs(inputs).unwrap();
    let mut routed = 0;
    let target_ops = rng.gen_range(1..=max_gates);
    for _ in 0..4 * target_ops {
        if routed >= target_ops {
            break;
        }
        if rng.gen_bool(0.2) {
            let index = rng.gen_range(1..=n);
            let gate = match rng.gen_range(0..if probabilistic { 5 } else { 3 }) {
                0 => OneBitGate::NOT,
                1 => OneBitGate::SET,
                2 => OneBitGate::RST,
                3 => OneBitGate::RAND,
                _ => OneBitGate::new(rng.gen(), rng.gen()).unwrap(),
            };
            c.push(CircuitOp::OneBit { index, gate }).unwrap();
            continue;
        }
        let first = rng.gen_range(1..=n);
        // mostly short range, sometimes long
        let reach = if rng.gen_bool(0.7) { 1 } else { n - 1 };
        let lo = first.saturating_sub(reach).max(1);
        let hi = (first + reach).min(n);
        let second = loop {
            let s = rng.gen_range(lo..=hi);
            if s != first {
                break s;
            }
        };
        let cost = 1 + 2 * (first.abs_diff(second) - 1);
        if routed + cost > max_gates {
            continue;
        }
        routed += cost;
        let gate = TwoBitGate::builtin(RANDOM_TWO_BIT.choose(&mut rng).unwrap()).unwrap();
        c.push(CircuitOp::TwoBit { first, second, gate }).unwrap();
    }
    let n_out = rng.gen_range(1..=n.min(3));
    bits.shuffle(&mut rng);
    c.set_outputs(bits[..n_out].to_vec()).unwrap();
    c
}

/// Seeded random circuit with inserts and removes mixed into the gates.
pub fn random_reshaping_circuit(seed: u64, max_bits: usize, max_gates: usize) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(3..=max_bits - 2);
    let inputs: Vec<usize> = (1..=n).filter(|_| rng.gen_bool(0.7)).collect();
    let mut c = Circuit::new(n).unwrap();
    c.set_inputs(inputs).unwrap();
    let mut width = n;
    for _ in 0..max_gates {
        match rng.gen_range(0..10) {
            0 if width < max_bits => {
                let position = rng.gen_range(0..=width);
                c.push(CircuitOp::Insert { position, value: rng.gen() }).unwrap();
                width += 1;
            }
            1 if width > 2 => {
                c.push(CircuitOp::Remove { index: rng.gen_range(1..=width) }).unwrap();
                width -= 1;
            }
            _ => {
                let first = rng.gen_range(1..width);
                let gate = TwoBitGate::builtin(RANDOM_TWO_BIT.choose(&mut rng).unwrap()).unwrap();
                let (first, second) = if rng.gen() { (first, first + 1) } else { (first + 1, first) };
                c.push(CircuitOp::TwoBit { first, second, gate }).unwrap();
            }
        }
    }
    c.set_outputs(vec![rng.gen_range(1..=width)]).unwrap();
    c
}

/// Hand-written circuits plus seeded random ones, all with `n <= 12` and
/// at most 60 routed two-bit gates.
pub fn corpus() -> Vec<Instance> {
    let mut out = hand_written();
    for seed in 0..30 {
        out.push(Instance::new(
            format!("random_det_{seed}"),
            random_circuit(seed, MAX_CORPUS_BITS, MAX_CORPUS_GATES, false),
        ));
    }
    for seed in 0..10 {
        out.push(Instance::new(
            format!("random_prob_{seed}"),
            random_circuit(1000 + seed, MAX_CORPUS_BITS, MAX_CORPUS_GATES, true),
        ));
    }
    out
}

/// Every assignment of the output bits, in binary order.
pub fn all_targets(circuit: &Circuit) -> Vec<BitAssignment> {
    let outs = circuit.output_bits();
    (0u32..1 << outs.len())
        .map(|v| {
            let values: Vec<bool> = (0..outs.len()).map(|k| (v >> (outs.len() - 1 - k)) & 1 == 1).collect();
            BitAssignment::zip(outs, &values).unwrap()
        })
        .collect()
}

/// The input assignment numbered `x`, first input bit most significant.
pub fn input_assignment(circuit: &Circuit, x: u64) -> BitAssignment {
    let ins = circuit.input_bits();
    let values: Vec<bool> = (0..ins.len()).map(|k| (x >> (ins.len() - 1 - k)) & 1 == 1).collect();
    BitAssignment::zip(ins, &values).unwrap()
}

/// Smallest input (under `input_bits` order) whose outputs match `target`.
pub fn first_preimage(circuit: &Circuit, target: &BitAssignment) -> Option<BitAssignment> {
    (0u64..1 << circuit.n_inputs()).map(|x| input_assignment(circuit, x)).find(|x| {
        let out = matcomp::evaluate_deterministic(circuit, x).unwrap();
        target.iter().all(|(bit, v)| out[bit - 1] == v)
    })
}

/// Largest absolute entrywise difference.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub const DEEP_BITS: usize = 20;
pub const DEEP_GATES: usize = 400;

/// Copies input `i` onto bit `n + 1 - i` with long-range CXORs. After
/// routing, the middle cut carries one independent bit per copy, which
/// drives it to the largest possible bond dimension `2^k`.
pub fn rainbow_copy(n: usize, k: usize) -> Circuit {
    let inputs: Vec<usize> = (1..=k).collect();
    let mut b = Builder::new(n, &inputs);
    for i in 1..=k {
        b.named2("CXOR", i, n + 1 - i);
    }
    let outputs: Vec<usize> = (1..=k).map(|i| n + 1 - i).collect();
    b.finish(&outputs)
}

/// Alternating layers of nearest-neighbour gates, appended to `c` until it
/// holds `total` two-bit gates. `xor_weight` is the share of CXOR gates;
/// the rest split between SWAP and the irreversible gates.
pub fn append_brickwork(c: &mut Circuit, total: usize, xor_weight: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = c.final_width();
    let mut layer = 0;
    while c.two_bit_count() < total {
        for j in (1 + layer % 2..n).step_by(2) {
            if c.two_bit_count() >= total {
                break;
            }
            let r: f64 = rng.gen();
            let name = if r < xor_weight {
                "CXOR"
            } else if r < xor_weight + (1.0 - xor_weight) / 3.0 {
                "SWAP"
            } else {
                ["CNAND", "CAND", "COR", "CNOR"][rng.gen_range(0..4)]
            };
            let (first, second) = if rng.gen() { (j, j + 1) } else { (j + 1, j) };
            let gate = TwoBitGate::builtin(name).unwrap();
            c.push(CircuitOp::TwoBit { first, second, gate }).unwrap();
        }
        layer += 1;
    }
}

/// Deep 20-bit circuits, already nearest-neighbour, each with at most 400
/// two-bit gates.
pub fn adversarial() -> Vec<Instance> {
    let mut out = Vec::new();
    for k in [8, 10] {
        let mut c = route_nearest_neighbor(&rainbow_copy(DEEP_BITS, k));
        out.push(Instance::new(format!("rainbow_{k}"), c.clone()));
        append_brickwork(&mut c, DEEP_GATES, 0.6, k as u64);
        out.push(Instance::new(format!("rainbow_{k}_scrambled"), c));
    }
    for (seed, k) in [(1u64, 6usize), (2, 10), (3, 14), (4, 20)] {
        // inputs spread evenly among zeroed ancillas
        let inputs: Vec<usize> = (0..k).map(|i| 1 + i * DEEP_BITS / k).collect();
        let mut c = Circuit::new(DEEP_BITS).unwrap();
        c.set_inputs(inputs).unwrap();
        append_brickwork(&mut c, DEEP_GATES, 0.6, seed);
        c.set_outputs(vec![DEEP_BITS]).unwrap();
        out.push(Instance::new(format!("xor_brickwork_{k}"), c));
    }
    let mut c = Circuit::new(DEEP_BITS).unwrap();
    c.set_inputs((1..=DEEP_BITS).collect()).unwrap();
    append_brickwork(&mut c, DEEP_GATES, 0.1, 99);
    out.push(Instance::new("irreversible_brickwork", c));
    out
}
