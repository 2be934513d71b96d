//! Line-oriented netlist text format.
//!
//! ```text
//! # comment
//! inputs 2
//! g0 = IN 0
//! g1 = IN 1
//! g2 = AND g0 g1
//! out g2
//! ```
//!
//! `#` starts a comment anywhere on a line. The first non-comment line must
//! be the `inputs N` header, every operand must be defined on an earlier
//! line, and the final non-comment line names the output. Identifiers match
//! `g[0-9]+`; the emitter always numbers gates densely in definition order,
//! so emitted text reparses to a structurally identical circuit.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateId};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct NetlistError {
    pub line: usize,
    pub kind: NetlistErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetlistErrorKind {
    #[error("expected `inputs N` header")]
    MissingHeader,
    #[error("malformed line")]
    Syntax,
    #[error("bad identifier `{0}` (expected g<digits>)")]
    BadIdentifier(String),
    #[error("unknown operation `{0}`")]
    UnknownOp(String),
    #[error("wrong operand count for {0}")]
    Arity(String),
    #[error("duplicate definition of {0}")]
    Duplicate(String),
    #[error("operand {0} is not defined on an earlier line")]
    ForwardReference(String),
    #[error("variable index {var} out of range for {num_vars} inputs")]
    VarOutOfRange { var: usize, num_vars: usize },
    #[error("constant must be 0 or 1")]
    BadConst,
    #[error("number out of range")]
    BadNumber,
    #[error("content after the `out` line")]
    TrailingContent,
    #[error("missing `out` line")]
    MissingOutput,
}

fn err(line: usize, kind: NetlistErrorKind) -> NetlistError {
    NetlistError { line, kind }
}

fn parse_number(tok: &str, line: usize) -> Result<usize, NetlistError> {
    tok.parse::<usize>().map_err(|_| err(line, NetlistErrorKind::BadNumber))
}

fn check_identifier(tok: &str, line: usize) -> Result<(), NetlistError> {
    let digits = tok.strip_prefix('g');
    match digits {
        Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) => Ok(()),
        _ => Err(err(line, NetlistErrorKind::BadIdentifier(tok.to_string()))),
    }
}

impl Circuit {
    /// Serializes the circuit; gates are numbered densely by id.
    pub fn to_netlist(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "inputs {}", self.num_vars());
        for (id, gate) in self.gates().iter().enumerate() {
            let _ = match *gate {
                Gate::Input(v) => writeln!(s, "g{id} = IN {v}"),
                Gate::Const(b) => writeln!(s, "g{id} = CONST {}", b as u8),
                Gate::And(a, b) => writeln!(s, "g{id} = AND g{a} g{b}"),
                Gate::Or(a, b) => writeln!(s, "g{id} = OR g{a} g{b}"),
                Gate::Not(a) => writeln!(s, "g{id} = NOT g{a}"),
            };
        }
        let _ = writeln!(s, "out g{}", self.output());
        s
    }

    pub fn from_netlist(text: &str) -> Result<Circuit, NetlistError> {
        let mut num_vars: Option<usize> = None;
        let mut names: HashMap<String, GateId> = HashMap::new();
        let mut gates: Vec<Gate> = Vec::new();
        let mut output: Option<GateId> = None;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = content.split_whitespace().collect();

            if output.is_some() {
                return Err(err(line, NetlistErrorKind::TrailingContent));
            }

            let Some(n) = num_vars else {
                if tokens.len() != 2 || tokens[0] != "inputs" {
                    return Err(err(line, NetlistErrorKind::MissingHeader));
                }
                num_vars = Some(parse_number(tokens[1], line)?);
                continue;
            };

            if tokens[0] == "out" {
                if tokens.len() != 2 {
                    return Err(err(line, NetlistErrorKind::Arity("out".into())));
                }
                check_identifier(tokens[1], line)?;
                let id = *names.get(tokens[1]).ok_or_else(|| {
                    err(line, NetlistErrorKind::ForwardReference(tokens[1].to_string()))
                })?;
                output = Some(id);
                continue;
            }

            // gK = OP args...
            if tokens.len() < 3 || tokens[1] != "=" {
                return Err(err(line, NetlistErrorKind::Syntax));
            }
            let name = tokens[0];
            check_identifier(name, line)?;
            if names.contains_key(name) {
                return Err(err(line, NetlistErrorKind::Duplicate(name.to_string())));
            }
            let op = tokens[2];
            let args = &tokens[3..];
            let resolve = |tok: &str| -> Result<GateId, NetlistError> {
                check_identifier(tok, line)?;
                names
                    .get(tok)
                    .copied()
                    .ok_or_else(|| err(line, NetlistErrorKind::ForwardReference(tok.to_string())))
            };
            let gate = match op {
                "IN" => {
                    if args.len() != 1 {
                        return Err(err(line, NetlistErrorKind::Arity(op.into())));
                    }
                    let var = parse_number(args[0], line)?;
                    if var >= n {
                        return Err(err(line, NetlistErrorKind::VarOutOfRange { var, num_vars: n }));
                    }
                    Gate::Input(var)
                }
                "CONST" => {
                    if args.len() != 1 {
                        return Err(err(line, NetlistErrorKind::Arity(op.into())));
                    }
                    match args[0] {
                        "0" => Gate::Const(false),
                        "1" => Gate::Const(true),
                        _ => return Err(err(line, NetlistErrorKind::BadConst)),
                    }
                }
                "AND" | "OR" => {
                    if args.len() != 2 {
                        return Err(err(line, NetlistErrorKind::Arity(op.into())));
                    }
                    let a = resolve(args[0])?;
                    let b = resolve(args[1])?;
                    if op == "AND" {
                        Gate::And(a, b)
                    } else {
                        Gate::Or(a, b)
                    }
                }
                "NOT" => {
                    if args.len() != 1 {
                        return Err(err(line, NetlistErrorKind::Arity(op.into())));
                    }
                    Gate::Not(resolve(args[0])?)
                }
                other => return Err(err(line, NetlistErrorKind::UnknownOp(other.to_string()))),
            };
            gates.push(gate);
            names.insert(name.to_string(), gates.len() - 1);
        }

        let Some(n) = num_vars else {
            return Err(err(last_line.max(1), NetlistErrorKind::MissingHeader));
        };
        let Some(out) = output else {
            return Err(err(last_line.max(1), NetlistErrorKind::MissingOutput));
        };
        Circuit::new(n, gates, out).map_err(|_| err(last_line, NetlistErrorKind::Syntax))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    fn sample() -> Circuit {
        let mut b = CircuitBuilder::new(2);
        let x0 = b.input(0);
        let x1 = b.input(1);
        let n = b.not(x0);
        let a = b.and(n, x1);
        let k = b.constant(true);
        let o = b.or(a, k);
        b.finish(o)
    }

    #[test]
    fn round_trip_is_exact() {
        let c = sample();
        let text = c.to_netlist();
        let parsed = Circuit::from_netlist(&text).unwrap();
        assert_eq!(parsed, c);
        assert_eq!(parsed.to_netlist(), text);
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let text = "# header comment\n\ninputs 1\ng0 = IN 0 # trailing comment\ng1 = NOT g0\nout g1\n# afteremble\n";
        let c = Circuit::from_netlist(text).unwrap();
        assert_eq!(c.num_vars(), 1);
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn sparse_names_are_renumbered_densely() {
        let text = "inputs 1\ng7 = IN 0\ng3 = NOT g7\nout g3\n";
        let c = Circuit::from_netlist(text).unwrap();
        assert_eq!(c.gates(), &[Gate::Input(0), Gate::Not(0)]);
        assert_eq!(c.output(), 1);
    }

    #[test]
    fn rejections() {
        let cases: &[(&str, NetlistErrorKind)] = &[
            ("g0 = IN 0\n", NetlistErrorKind::MissingHeader),
            (
                "inputs 1\ng0 = IN 0\ng0 = NOT g0\nout g0\n",
                NetlistErrorKind::Duplicate("g0".into()),
            ),
            (
                "inputs 1\ng0 = NOT g1\ng1 = IN 0\nout g1\n",
                NetlistErrorKind::ForwardReference("g1".into()),
            ),
            ("inputs 1\ng0 = AND g0\nout g0\n", NetlistErrorKind::Arity("AND".into())),
            ("inputs 1\ng0 = XOR g0 g0\nout g0\n", NetlistErrorKind::UnknownOp("XOR".into())),
            ("inputs 1\nh0 = IN 0\nout h0\n", NetlistErrorKind::BadIdentifier("h0".into())),
            ("inputs 1\ng0 = IN 3\nout g0\n", NetlistErrorKind::VarOutOfRange { var: 3, num_vars: 1 }),
            ("inputs 1\ng0 = CONST 2\nout g0\n", NetlistErrorKind::BadConst),
            ("inputs 1\ng0 = IN 0\n", NetlistErrorKind::MissingOutput),
            ("inputs 1\ng0 = IN 0\nout g0\ng1 = NOT g0\n", NetlistErrorKind::TrailingContent),
        ];
        for (text, expected) in cases {
            let got = Circuit::from_netlist(text).unwrap_err();
            assert_eq!(&got.kind, expected, "for {text:?}");
        }
    }
}
