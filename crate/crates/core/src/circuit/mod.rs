//! Circuits: the text format, nearest-neighbour routing, and execution.
//!
//! Bit indices are 1-based and always refer to the chain as it stands when
//! the operation runs. `insert <p> <v>` places a new bit after bit `p`, so
//! every later bit shifts up by one; `remove <i>` shifts every later bit down.
//! For example, starting from `bits 3`:
//!
//! ```text
//! insert 1 0      # old bits 1 2 3 are now 1 3 4; the new bit is 2
//! gate CXOR 1 2   # writes x_1 XOR 0 into the new bit
//! remove 3        # drops old bit 2; old bit 3 is now bit 3 again
//! ```
//!
//! `input` indices name bits of the initial chain; `output` indices name bits
//! of the final chain.

mod exec;
mod parse;
mod route;

use std::fmt;

pub use exec::{execute, execute_logged, execute_observed};
pub use parse::parse_circuit;
pub use route::route_nearest_neighbor;

use crate::error::{Error, Result};
use crate::gates::{OneBitGate, TwoBitGate};

#[derive(Clone, Debug, PartialEq)]
pub enum CircuitOp {
    OneBit {
        index: usize,
        gate: OneBitGate,
    },
    /// `gate` reads `first` as its `a` operand and `second` as `b`.
    TwoBit {
        first: usize,
        second: usize,
        gate: TwoBitGate,
    },
    /// New bit after `position` (0 prepends), pinned to `value`.
    Insert {
        position: usize,
        value: bool,
    },
    Remove {
        index: usize,
    },
    Sweep,
}

impl CircuitOp {
    /// Chain width after this op, given the width before it.
    fn width_after(&self, width: usize) -> usize {
        match self {
            CircuitOp::Insert { .. } => width + 1,
            CircuitOp::Remove { .. } => width - 1,
            _ => width,
        }
    }

    fn check(&self, width: usize) -> Result<()> {
        let in_range = |index: usize| {
            if index == 0 || index > width {
                Err(Error::IndexOutOfRange { index, n: width })
            } else {
                Ok(())
            }
        };
        match *self {
            CircuitOp::OneBit { index, .. } => in_range(index),
            CircuitOp::TwoBit { first, second, .. } => {
                in_range(first)?;
                in_range(second)?;
                if first == second {
                    return Err(Error::InvalidGate(format!("two-bit gate on bit {first} twice")));
                }
                Ok(())
            }
            CircuitOp::Insert { position, .. } if position > width => {
                Err(Error::PositionOutOfRange { position, n: width })
            }
            CircuitOp::Insert { .. } => Ok(()),
            CircuitOp::Remove { .. } if width == 1 => Err(Error::RemoveLastBit),
            CircuitOp::Remove { index } => in_range(index),
            CircuitOp::Sweep => Ok(()),
        }
    }
}

impl fmt::Display for CircuitOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitOp::OneBit { index, gate } => match gate.name() {
                Some(name) => write!(f, "gate {name} {index}"),
                None => write!(f, "pgate {index} {} {}", gate.p(), gate.q()),
            },
            CircuitOp::TwoBit { first, second, gate } => write!(f, "gate {} {first} {second}", gate.name()),
            CircuitOp::Insert { position, value } => write!(f, "insert {position} {}", u8::from(*value)),
            CircuitOp::Remove { index } => write!(f, "remove {index}"),
            CircuitOp::Sweep => f.write_str("sweep"),
        }
    }
}

/// A validated sequence of operations with designated input and output bits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_declared: usize,
    input_bits: Vec<usize>,
    output_bits: Vec<usize>,
    ops: Vec<CircuitOp>,
    custom_gates: Vec<TwoBitGate>,
}

impl Circuit {
    /// An empty `n`-bit circuit with no inputs or outputs.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::IndexOutOfRange { index: 0, n: 0 });
        }
        Ok(Self {
            n_declared: n,
            input_bits: Vec::new(),
            output_bits: Vec::new(),
            ops: Vec::new(),
            custom_gates: Vec::new(),
        })
    }

    pub fn n_declared(&self) -> usize {
        self.n_declared
    }

    pub fn input_bits(&self) -> &[usize] {
        &self.input_bits
    }

    pub fn output_bits(&self) -> &[usize] {
        &self.output_bits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn custom_gates(&self) -> &[TwoBitGate] {
        &self.custom_gates
    }

    pub fn n_inputs(&self) -> usize {
        self.input_bits.len()
    }

    /// Width of the chain after the last op.
    pub fn final_width(&self) -> usize {
        self.ops.iter().fold(self.n_declared, |w, op| op.width_after(w))
    }

    /// Widest the chain gets at any point.
    pub fn max_width(&self) -> usize {
        self.ops
            .iter()
            .scan(self.n_declared, |w, op| {
                *w = op.width_after(*w);
                Some(*w)
            })
            .fold(self.n_declared, usize::max)
    }

    /// Two-bit ops in the circuit as written (sweeps not included).
    pub fn two_bit_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, CircuitOp::TwoBit { .. })).count()
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        self.ops.iter().all(|op| match op {
            CircuitOp::TwoBit { first, second, .. } => first.abs_diff(*second) == 1,
            _ => true,
        })
    }

    /// True when every one-bit gate maps each input to a single output.
    pub fn is_deterministic(&self) -> bool {
        self.first_probabilistic_op().is_none()
    }

    pub(crate) fn first_probabilistic_op(&self) -> Option<usize> {
        self.ops.iter().position(|op| matches!(op, CircuitOp::OneBit { gate, .. } if !gate.is_deterministic()))
    }

    pub fn set_inputs(&mut self, bits: Vec<usize>) -> Result<()> {
        check_distinct(&bits, self.n_declared, "input")?;
        self.input_bits = bits;
        Ok(())
    }

    /// Output bits are checked against the final width.
    pub fn set_outputs(&mut self, bits: Vec<usize>) -> Result<()> {
        check_distinct(&bits, self.final_width(), "output")?;
        self.output_bits = bits;
        Ok(())
    }

    /// Appends an op, validated against the current final width. Outputs set
    /// earlier must still be in range afterwards.
    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        let width = self.final_width();
        op.check(width)?;
        let after = op.width_after(width);
        if let Some(&bad) = self.output_bits.iter().find(|&&b| b > after) {
            return Err(Error::IndexOutOfRange { index: bad, n: after });
        }
        self.ops.push(op);
        Ok(())
    }

    /// Registers a named truth-table gate so that it prints as a `table2` line.
    pub fn define_gate(&mut self, gate: TwoBitGate) -> Result<()> {
        if TwoBitGate::builtin(gate.name()).is_some() || OneBitGate::builtin(gate.name()).is_some() {
            return Err(Error::InvalidGate(format!("{} shadows a built-in gate", gate.name())));
        }
        if self.custom_gate(gate.name()).is_some() {
            return Err(Error::InvalidGate(format!("{} is already defined", gate.name())));
        }
        self.custom_gates.push(gate);
        Ok(())
    }

    pub fn custom_gate(&self, name: &str) -> Option<&TwoBitGate> {
        self.custom_gates.iter().find(|g| g.name() == name)
    }

    fn with_ops(&self, ops: Vec<CircuitOp>) -> Self {
        Self { ops, ..self.clone() }
    }
}

fn check_distinct(bits: &[usize], width: usize, what: &str) -> Result<()> {
    for (k, &b) in bits.iter().enumerate() {
        if b == 0 || b > width {
            return Err(Error::IndexOutOfRange { index: b, n: width });
        }
        if bits[..k].contains(&b) {
            return Err(Error::InvalidAssignment(format!("{what} bit {b} listed twice")));
        }
    }
    Ok(())
}

/// Prints the circuit in the text format accepted by [`parse_circuit`].
impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |bits: &[usize]| bits.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        writeln!(f, "bits {}", self.n_declared)?;
        for g in &self.custom_gates {
            writeln!(f, "table2 {} {}", g.name(), g.table_string())?;
        }
        if !self.input_bits.is_empty() {
            writeln!(f, "input {}", join(&self.input_bits))?;
        }
        if !self.output_bits.is_empty() {
            writeln!(f, "output {}", join(&self.output_bits))?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}
