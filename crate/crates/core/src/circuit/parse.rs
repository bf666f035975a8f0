use crate::error::{Error, ParseError};
use crate::gates::{OneBitGate, TwoBitGate};

use super::{Circuit, CircuitOp};

/// Reads the line-oriented circuit format. Every rejected construct is
/// reported with its 1-based line number.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut inputs_seen = false;
    let mut outputs: Option<(usize, Vec<usize>)> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ParseError::new(line_no, msg);
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().expect("line is not empty");
        let args: Vec<&str> = tokens.collect();

        let Some(c) = circuit.as_mut() else {
            if keyword != "bits" {
                return Err(err(format!("expected `bits <n>` before `{keyword}`")));
            }
            let [n] = args[..] else {
                return Err(err("`bits` takes exactly one count".into()));
            };
            let n = parse_index(n).map_err(err)?;
            if n == 0 {
                return Err(err("bit count must be positive".into()));
            }
            circuit = Some(Circuit::new(n).expect("n > 0"));
            continue;
        };

        let lift = |e: Error| ParseError::new(line_no, e.to_string());

        match keyword {
            "bits" => return Err(err("`bits` appears more than once".into())),
            "input" => {
                if std::mem::replace(&mut inputs_seen, true) {
                    return Err(err("`input` appears more than once".into()));
                }
                let bits = parse_indices(&args).map_err(err)?;
                c.set_inputs(bits).map_err(lift)?;
            }
            "output" => {
                if outputs.is_some() {
                    return Err(err("`output` appears more than once".into()));
                }
                outputs = Some((line_no, parse_indices(&args).map_err(err)?));
            }
            "gate" => {
                let Some((&name, idx)) = args.split_first() else {
                    return Err(err("`gate` needs a name and bit indices".into()));
                };
                let idx = parse_indices(idx).map_err(err)?;
                let op = if let Some(gate) = OneBitGate::builtin(name) {
                    let [index] = idx[..] else {
                        return Err(err(format!("{name} is a one-bit gate and takes 1 index, got {}", idx.len())));
                    };
                    CircuitOp::OneBit { index, gate }
                } else if let Some(gate) = TwoBitGate::builtin(name).or_else(|| c.custom_gate(name).cloned()) {
                    let [first, second] = idx[..] else {
                        return Err(err(format!("{name} is a two-bit gate and takes 2 indices, got {}", idx.len())));
                    };
                    CircuitOp::TwoBit { first, second, gate }
                } else {
                    return Err(err(format!("unknown gate `{name}`")));
                };
                c.push(op).map_err(lift)?;
            }
            "pgate" => {
                let [index, p, q] = args[..] else {
                    return Err(err("`pgate` takes <bit> <p> <q>".into()));
                };
                let index = parse_index(index).map_err(err)?;
                let prob = |s: &str| s.parse::<f64>().map_err(|_| err(format!("`{s}` is not a number")));
                let gate = OneBitGate::new(prob(p)?, prob(q)?).map_err(lift)?;
                c.push(CircuitOp::OneBit { index, gate }).map_err(lift)?;
            }
            "table2" => {
                let [name, t00, t01, t10, t11] = args[..] else {
                    return Err(err("`table2` takes a name and four 2-digit output pairs".into()));
                };
                if !name.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                    return Err(err(format!("`{name}` is not a valid gate name")));
                }
                let mut logic_a = [false; 4];
                let mut logic_b = [false; 4];
                for (k, cell) in [t00, t01, t10, t11].into_iter().enumerate() {
                    let (a, b) = match cell {
                        "00" => (false, false),
                        "01" => (false, true),
                        "10" => (true, false),
                        "11" => (true, true),
                        _ => return Err(err(format!("`{cell}` is not a 2-digit output pair"))),
                    };
                    logic_a[k] = a;
                    logic_b[k] = b;
                }
                c.define_gate(TwoBitGate::from_tables(name, logic_a, logic_b)).map_err(lift)?;
            }
            "insert" => {
                let [position, value] = args[..] else {
                    return Err(err("`insert` takes <position> <value>".into()));
                };
                let position = parse_index(position).map_err(err)?;
                let value = parse_bit(value).map_err(err)?;
                c.push(CircuitOp::Insert { position, value }).map_err(lift)?;
            }
            "remove" => {
                let [index] = args[..] else {
                    return Err(err("`remove` takes one bit index".into()));
                };
                let index = parse_index(index).map_err(err)?;
                c.push(CircuitOp::Remove { index }).map_err(lift)?;
            }
            "sweep" => {
                if !args.is_empty() {
                    return Err(err("`sweep` takes no arguments".into()));
                }
                c.push(CircuitOp::Sweep).map_err(lift)?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let last_line = text.lines().count().max(1);
    let mut circuit = circuit.ok_or_else(|| ParseError::new(last_line, "missing `bits <n>`"))?;
    if let Some((line_no, bits)) = outputs {
        circuit.set_outputs(bits).map_err(|e| ParseError::new(line_no, e.to_string()))?;
    }
    Ok(circuit)
}

fn parse_index(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a bit index"))
}

fn parse_indices(args: &[&str]) -> Result<Vec<usize>, String> {
    args.iter().map(|s| parse_index(s)).collect()
}

fn parse_bit(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(format!("`{s}` is not a bit value")),
    }
}
