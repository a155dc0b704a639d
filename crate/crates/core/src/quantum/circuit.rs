// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::ring::RingAmplitude;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    S(usize),
    T(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) | Gate::S(q) | Gate::T(q) => vec![q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) => vec![a, b],
        }
    }

    /// Matrix on the gate's own qubits in the basis `|b_0 b_1⟩`, where `b_0`
    /// belongs to the first listed qubit and is the high bit of the row index.
    pub fn matrix(&self) -> Vec<Vec<RingAmplitude>> {
        let z = RingAmplitude::zero;
        let o = RingAmplitude::one;
        let i = RingAmplitude::i;
        let h = RingAmplitude::inv_sqrt2;
        match self {
            Gate::H(_) => vec![vec![h(), h()], vec![h(), -h()]],
            Gate::X(_) => vec![vec![z(), o()], vec![o(), z()]],
            Gate::Y(_) => vec![vec![z(), -i()], vec![i(), z()]],
            Gate::Z(_) => vec![vec![o(), z()], vec![z(), -o()]],
            Gate::S(_) => vec![vec![o(), z()], vec![z(), i()]],
            Gate::T(_) => vec![vec![o(), z()], vec![z(), RingAmplitude::omega()]],
            Gate::Cnot(..) => vec![
                vec![o(), z(), z(), z()],
                vec![z(), o(), z(), z()],
                vec![z(), z(), z(), o()],
                vec![z(), z(), o(), z()],
            ],
            Gate::Cz(..) => vec![
                vec![o(), z(), z(), z()],
                vec![z(), o(), z(), z()],
                vec![z(), z(), o(), z()],
                vec![z(), z(), z(), -o()],
            ],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Gate(Gate),
    Measure(usize),
}

/// Gates and intermediate measurements on `n_qubits` qubits, accepting when
/// every `(qubit, bit)` constraint holds on the final basis state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<Op>,
    accept: Vec<(usize, bool)>,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<Op>, accept: Vec<(usize, bool)>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvariantViolation(m));
        if accept.is_empty() {
            return bad("circuit needs at least one accept constraint".into());
        }
        for op in &ops {
            let qs = match op {
                Op::Gate(g) => g.qubits(),
                Op::Measure(q) => vec![*q],
            };
            if let Some(q) = qs.iter().find(|&&q| q >= n_qubits) {
                return bad(format!("qubit {q} out of range for {n_qubits} qubits"));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return bad(format!("two-qubit gate on a single qubit {}", qs[0]));
            }
        }
        if let Some((q, _)) = accept.iter().find(|(q, _)| *q >= n_qubits) {
            return bad(format!("accept constraint on qubit {q} out of range"));
        }
        Ok(Circuit { n_qubits, ops, accept })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn accept(&self) -> &[(usize, bool)] {
        &self.accept
    }

    /// Whether a basis state (bit `q` = qubit `q`) satisfies the accept predicate.
    pub fn accepts(&self, state: u64) -> bool {
        self.accept.iter().all(|&(q, b)| (state >> q & 1 == 1) == b)
    }

    /// The same circuit with the accept predicate replaced.
    pub fn with_accept(&self, accept: Vec<(usize, bool)>) -> Result<Self> {
        Circuit::new(self.n_qubits, self.ops.clone(), accept)
    }

    pub fn hadamard_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Gate(Gate::H(_)))).count()
    }

    pub fn measure_count(&self) -> usize {
        self.ops.iter().filter(|op| matches!(op, Op::Measure(_))).count()
    }

    /// Basis state from an input bitstring (character `q` is qubit `q`;
    /// missing trailing qubits start at 0).
    pub fn initial_state(&self, input: &crate::BitString) -> Result<u64> {
        if input.len() > self.n_qubits {
            return Err(Error::Precondition(format!(
                "input has {} bits for {} qubits",
                input.len(),
                self.n_qubits
            )));
        }
        Ok(input
            .bits()
            .iter()
            .enumerate()
            .fold(0u64, |s, (q, &b)| s | (b as u64) << q))
    }
}

/// Replaces each `Measure(q)` by `CNOT(q → a)` on a fresh ancilla `a`. The
/// accept predicate ignores the ancillas, so their outcomes are summed over.
pub fn defer_measurements(circuit: &Circuit) -> Circuit {
    let mut n = circuit.n_qubits;
    let ops = circuit
        .ops
        .iter()
        .map(|op| match *op {
            Op::Measure(q) => {
                n += 1;
                Op::Gate(Gate::Cnot(q, n - 1))
            }
            g => g,
        })
        .collect();
    Circuit { n_qubits: n, ops, accept: circuit.accept.clone() }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "WCQC")?;
        writeln!(f, "{}", self.n_qubits)?;
        for op in &self.ops {
            match op {
                Op::Gate(Gate::H(q)) => writeln!(f, "H {q}")?,
                Op::Gate(Gate::X(q)) => writeln!(f, "X {q}")?,
                Op::Gate(Gate::Y(q)) => writeln!(f, "Y {q}")?,
                Op::Gate(Gate::Z(q)) => writeln!(f, "Z {q}")?,
                Op::Gate(Gate::S(q)) => writeln!(f, "S {q}")?,
                Op::Gate(Gate::T(q)) => writeln!(f, "T {q}")?,
                Op::Gate(Gate::Cnot(c, t)) => writeln!(f, "CNOT {c} {t}")?,
                Op::Gate(Gate::Cz(a, b)) => writeln!(f, "CZ {a} {b}")?,
                Op::Measure(q) => writeln!(f, "MEASURE {q}")?,
            }
        }
        let cs: Vec<String> = self.accept.iter().map(|(q, b)| format!("{q}={}", *b as u8)).collect();
        writeln!(f, "ACCEPT {}", cs.join(" "))
    }
}

impl FromStr for Circuit {
    type Err = Error;

    /// `WCQC`, qubit count, one op per line, final `ACCEPT q=b ...`.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "WCQC")) => {}
            Some((ln, _)) => return Err(Error::parse(ln, "expected magic line 'WCQC'")),
            None => return Err(Error::parse(1, "empty circuit file")),
        }
        let (ln, n) = lines.next().ok_or_else(|| Error::parse(2, "missing qubit count"))?;
        let n: usize = n.parse().map_err(|_| Error::parse(ln, "invalid qubit count"))?;
        let mut ops = Vec::new();
        let mut accept = None;
        for (ln, line) in lines {
            if accept.is_some() {
                return Err(Error::parse(ln, "content after ACCEPT line"));
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let q = |i: usize| -> Result<usize> {
                toks.get(i)
                    .ok_or_else(|| Error::parse(ln, "missing qubit index"))?
                    .parse()
                    .map_err(|_| Error::parse(ln, "invalid qubit index"))
            };
            let arity = |k: usize| -> Result<()> {
                if toks.len() == k + 1 {
                    Ok(())
                } else {
                    Err(Error::parse(ln, format!("{} takes {k} qubit(s)", toks[0])))
                }
            };
            let op = match toks[0].to_ascii_uppercase().as_str() {
                "ACCEPT" => {
                    let mut cs = Vec::new();
                    for t in &toks[1..] {
                        let (q, b) = t
                            .split_once('=')
                            .ok_or_else(|| Error::parse(ln, format!("bad constraint '{t}'")))?;
                        let q = q.parse().map_err(|_| Error::parse(ln, "invalid qubit index"))?;
                        let b = match b {
                            "0" => false,
                            "1" => true,
                            _ => return Err(Error::parse(ln, format!("bad bit in '{t}'"))),
                        };
                        cs.push((q, b));
                    }
                    accept = Some(cs);
                    continue;
                }
                "MEASURE" => {
                    arity(1)?;
                    Op::Measure(q(1)?)
                }
                "CNOT" => {
                    arity(2)?;
                    Op::Gate(Gate::Cnot(q(1)?, q(2)?))
                }
                "CZ" => {
                    arity(2)?;
                    Op::Gate(Gate::Cz(q(1)?, q(2)?))
                }
                g => {
                    arity(1)?;
                    let q = q(1)?;
                    Op::Gate(match g {
                        "H" => Gate::H(q),
                        "X" => Gate::X(q),
                        "Y" => Gate::Y(q),
                        "Z" => Gate::Z(q),
                        "S" => Gate::S(q),
                        "T" => Gate::T(q),
                        _ => return Err(Error::parse(ln, format!("unknown op '{}'", toks[0]))),
                    })
                }
            };
            ops.push(op);
        }
        let last = text.lines().count();
        let accept = accept.ok_or_else(|| Error::parse(last, "missing ACCEPT line"))?;
        Circuit::new(n, ops, accept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_mul_dagger(m: &[Vec<RingAmplitude>]) -> Vec<Vec<RingAmplitude>> {
        let n = m.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(RingAmplitude::zero(), |acc, k| &acc + &(&m[i][k] * &m[j][k].conj()))
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn gates_are_unitary() {
        for g in [Gate::H(0), Gate::X(0), Gate::Y(0), Gate::Z(0), Gate::S(0), Gate::T(0), Gate::Cnot(0, 1), Gate::Cz(0, 1)] {
            let p = mat_mul_dagger(&g.matrix());
            for (i, row) in p.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    let want = if i == j { RingAmplitude::one() } else { RingAmplitude::zero() };
                    assert_eq!(*v, want, "{g:?} at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn parse_round_trip() {
        let text = "WCQC\n3\nH 0\nCNOT 0 2\nT 1\nMEASURE 2\nCZ 1 2\nACCEPT 0=1 2=0\n";
        let c: Circuit = text.parse().unwrap();
        assert_eq!(c.n_qubits(), 3);
        assert_eq!(c.ops().len(), 5);
        assert_eq!(c.to_string(), text);
    }

    #[test]
    fn parse_errors() {
        let missing = "WCQC\n1\nH 0\n".parse::<Circuit>();
        assert!(matches!(missing, Err(Error::Parse { line: 3, .. })));
        assert!(matches!("QC\n1\n".parse::<Circuit>(), Err(Error::Parse { line: 1, .. })));
        assert!(matches!("WCQC\n1\nH 3\nACCEPT 0=1\n".parse::<Circuit>(), Err(Error::InvariantViolation(_))));
        assert!(matches!("WCQC\n2\nCNOT 1 1\nACCEPT 0=1\n".parse::<Circuit>(), Err(Error::InvariantViolation(_))));
        assert!(matches!("WCQC\n1\nFOO 0\nACCEPT 0=1\n".parse::<Circuit>(), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn deferral_adds_ancillas() {
        let c: Circuit = "WCQC\n1\nH 0\nMEASURE 0\nH 0\nACCEPT 0=1\n".parse().unwrap();
        let d = defer_measurements(&c);
        assert_eq!(d.n_qubits(), 2);
        assert_eq!(d.ops()[1], Op::Gate(Gate::Cnot(0, 1)));
        assert_eq!(d.measure_count(), 0);
        let plain: Circuit = "WCQC\n1\nH 0\nACCEPT 0=1\n".parse().unwrap();
        assert_eq!(defer_measurements(&plain), plain);
    }
}
