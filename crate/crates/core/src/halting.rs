// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! A weighted counting problem over the rationals whose decision variant
//! encodes halting: `w(x, 0) = 2^{-t}` when the machine halts after `t` steps.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::arith::{pow2, scaled_nearest};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{RangeTag, WeightOracle, WeightedCountingProblem};
use crate::poly::IntPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    fn parse(s: &str) -> Option<Symbol> {
        match s {
            "0" => Some(Symbol::Zero),
            "1" => Some(Symbol::One),
            "_" => Some(Symbol::Blank),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symbol::Zero => "0",
            Symbol::One => "1",
            Symbol::Blank => "_",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    Left,
    Right,
    Stay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub write: Symbol,
    pub step: Move,
    pub next: usize,
}

/// Single-tape machine over `{0, 1, _}`. The transition table is total on
/// every non-halting state; state `halt` has no transitions.
#[derive(Clone, Debug)]
pub struct ToyMachine {
    states: usize,
    start: usize,
    halt: usize,
    table: HashMap<(usize, Symbol), Transition>,
}

const SYMBOLS: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

impl ToyMachine {
    pub fn new(
        states: usize,
        start: usize,
        halt: usize,
        table: HashMap<(usize, Symbol), Transition>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvariantViolation(m));
        if start >= states || halt >= states {
            return bad(format!("start {start} / halt {halt} out of range"));
        }
        for q in (0..states).filter(|&q| q != halt) {
            for s in SYMBOLS {
                match table.get(&(q, s)) {
                    None => return bad(format!("missing transition for ({q}, {s})")),
                    Some(t) if t.next >= states => {
                        return bad(format!("transition ({q}, {s}) targets unknown state"))
                    }
                    _ => {}
                }
            }
        }
        if SYMBOLS.iter().any(|&s| table.contains_key(&(halt, s))) {
            return bad("halting state has transitions".into());
        }
        Ok(ToyMachine {
            states,
            start,
            halt,
            table,
        })
    }

    /// Text form: header `states S start A halt H`, then one line per
    /// transition `q sym -> write move next` with `move ∈ {L, R, S}`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty machine"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(ln, "bad number"));
        if h.len() != 6 || h[0] != "states" || h[2] != "start" || h[4] != "halt" {
            return Err(Error::parse(ln, "expected 'states S start A halt H'"));
        }
        let (states, start, halt) = (num(h[1])?, num(h[3])?, num(h[5])?);
        let mut table = HashMap::new();
        for (ln, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 6 || t[2] != "->" {
                return Err(Error::parse(ln, "expected 'q sym -> write move next'"));
            }
            let sym = |s: &str| Symbol::parse(s).ok_or_else(|| Error::parse(ln, "bad symbol"));
            let step = match t[4] {
                "L" => Move::Left,
                "R" => Move::Right,
                "S" => Move::Stay,
                _ => return Err(Error::parse(ln, "bad move")),
            };
            let q = t[0].parse::<usize>().map_err(|_| Error::parse(ln, "bad state"))?;
            let next = t[5].parse::<usize>().map_err(|_| Error::parse(ln, "bad state"))?;
            if table
                .insert((q, sym(t[1])?), Transition { write: sym(t[3])?, step, next })
                .is_some()
            {
                return Err(Error::parse(ln, "duplicate transition"));
            }
        }
        ToyMachine::new(states, start, halt, table)
    }

    /// Walks right `t` times, then halts.
    pub fn halting_after(t: usize) -> Self {
        let mut table = HashMap::new();
        for q in 0..t {
            for s in SYMBOLS {
                table.insert((q, s), Transition { write: s, step: Move::Right, next: q + 1 });
            }
        }
        ToyMachine::new(t + 1, 0, t, table).expect("well-formed")
    }

    /// Never halts.
    pub fn looping() -> Self {
        let mut table = HashMap::new();
        for s in SYMBOLS {
            table.insert((0, s), Transition { write: s, step: Move::Stay, next: 0 });
        }
        ToyMachine::new(2, 0, 1, table).expect("well-formed")
    }

    /// Scans right over the input and halts on the first blank: `|y| + 1` steps.
    pub fn scan_to_blank() -> Self {
        let mut table = HashMap::new();
        for s in [Symbol::Zero, Symbol::One] {
            table.insert((0, s), Transition { write: s, step: Move::Right, next: 0 });
        }
        table.insert((0, Symbol::Blank), Transition { write: Symbol::Blank, step: Move::Stay, next: 1 });
        ToyMachine::new(2, 0, 1, table).expect("well-formed")
    }

    /// Halts after the input iff it contains a 1, otherwise runs right forever.
    pub fn seek_one() -> Self {
        let mut table = HashMap::new();
        table.insert((0, Symbol::Zero), Transition { write: Symbol::Zero, step: Move::Right, next: 0 });
        table.insert((0, Symbol::Blank), Transition { write: Symbol::Blank, step: Move::Right, next: 0 });
        table.insert((0, Symbol::One), Transition { write: Symbol::One, step: Move::Stay, next: 1 });
        ToyMachine::new(2, 0, 1, table).expect("well-formed")
    }

    pub fn states(&self) -> usize {
        self.states
    }

    /// Number of steps until the halting state is entered, if within `max_steps`.
    pub fn run(&self, input: &BitString, max_steps: u64) -> Option<u64> {
        let mut tape: HashMap<i64, Symbol> = input
            .bits()
            .iter()
            .enumerate()
            .map(|(i, &b)| (i as i64, if b { Symbol::One } else { Symbol::Zero }))
            .collect();
        let (mut head, mut state) = (0i64, self.start);
        for step in 0..=max_steps {
            if state == self.halt {
                return Some(step);
            }
            if step == max_steps {
                break;
            }
            let sym = tape.get(&head).copied().unwrap_or(Symbol::Blank);
            let t = self.table[&(state, sym)];
            tape.insert(head, t.write);
            head += match t.step {
                Move::Left => -1,
                Move::Right => 1,
                Move::Stay => 0,
            };
            state = t.next;
        }
        None
    }
}

struct HaltingOracle {
    machine: ToyMachine,
    input: BitString,
    path_poly: IntPolynomial,
}

impl WeightOracle for HaltingOracle {
    fn range_tag(&self) -> RangeTag {
        RangeTag::Real
    }

    /// Simulates `b + p(|x|)` steps; a run halting at step `t` within that
    /// budget reports `2^{-t}`, otherwise 0.
    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        if !u.is_all_zero() {
            return Ok(BigInt::zero());
        }
        let budget = b as u64 + self.path_poly.eval(x.len() as u64);
        Ok(match self.machine.run(&self.input, budget) {
            Some(t) => scaled_nearest(&BigRational::new(1.into(), pow2(t as u32)), b),
            None => BigInt::zero(),
        })
    }

    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        Some(0)
    }
}

/// `w(x, 0) = 2^{-t}` if `machine` halts on `y` after `t` steps, else 0;
/// `w(x, u) = 0` for `u ≠ 0`. There is no exact map: halting is undecidable.
pub fn halting_oracle(machine: &ToyMachine, y: &BitString) -> WeightedCountingProblem {
    let path_poly = IntPolynomial::constant(1);
    WeightedCountingProblem::new(
        path_poly.clone(),
        HaltingOracle {
            machine: machine.clone(),
            input: y.clone(),
            path_poly,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::counting::{approx_sum, exact_sum};
    use num_traits::Signed;

    #[test]
    fn halting_times() {
        assert_eq!(ToyMachine::halting_after(0).run(&BitString::new(), 0), Some(0));
        assert_eq!(ToyMachine::halting_after(3).run(&BitString::new(), 10), Some(3));
        assert_eq!(ToyMachine::halting_after(3).run(&BitString::new(), 2), None);
        assert_eq!(ToyMachine::looping().run(&BitString::new(), 1000), None);
        let y: BitString = "0110".parse().unwrap();
        assert_eq!(ToyMachine::scan_to_blank().run(&y, 100), Some(5));
        assert_eq!(ToyMachine::seek_one().run(&y, 100), Some(2));
        assert_eq!(ToyMachine::seek_one().run(&"000".parse().unwrap(), 100), None);
    }

    #[test]
    fn oracle_examples() {
        let x = BitString::new();
        let p = halting_oracle(&ToyMachine::halting_after(3), &x);
        let v = approx_sum(&p, &x, 10).unwrap().to_rational();
        assert!((v - rat(1, 8)).abs() <= rat(1, 1024));
        let lp = halting_oracle(&ToyMachine::looping(), &x);
        for b in [0, 5, 20] {
            assert!(approx_sum(&lp, &x, b).unwrap().is_zero());
        }
        let zero = halting_oracle(&ToyMachine::halting_after(0), &x);
        for b in [0, 4, 12] {
            let v = approx_sum(&zero, &x, b).unwrap().to_rational();
            assert!((v - rat(1, 1)).abs() <= BigRational::new(1.into(), pow2(b)));
        }
        assert!(exact_sum(&p, &x).is_err());
    }

    #[test]
    fn parse_machine() {
        let m = ToyMachine::parse(
            "states 2 start 0 halt 1\n0 0 -> 0 R 0\n0 1 -> 1 R 0\n0 _ -> _ S 1\n",
        )
        .unwrap();
        assert_eq!(m.run(&"101".parse().unwrap(), 50), Some(4));
        assert!(ToyMachine::parse("states 2 start 0 halt 1\n0 0 -> 0 R 0\n").is_err());
        assert!(ToyMachine::parse("states 2 start 0 halt 1\n0 0 -> 0 Q 0\n").is_err());
    }
}
