// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Propositional formulas and their encoding as a PGM whose partition
//! function is the fraction of satisfying assignments.

use std::fmt;
use std::str::FromStr;

use super::{Factor, Pgm};
use crate::arith::rat;
use crate::error::{Error, Result};

/// Formula over variables `x1, x2, …`. Text syntax: `!`/`~`/`¬`, `&`/`∧`,
/// `|`/`∨`, parentheses; negation binds tightest, then conjunction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(i: usize) -> Self {
        Formula::Var(i)
    }

    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Largest variable index `N`.
    pub fn num_vars(&self) -> usize {
        match self {
            Formula::Var(i) => *i,
            Formula::Not(a) => a.num_vars(),
            Formula::And(a, b) | Formula::Or(a, b) => a.num_vars().max(b.num_vars()),
        }
    }

    pub fn connectives(&self) -> usize {
        match self {
            Formula::Var(_) => 0,
            Formula::Not(a) => 1 + a.connectives(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.connectives() + b.connectives(),
        }
    }

    /// `values[i - 1]` is the value of `x_i`.
    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            Formula::Var(i) => values[i - 1],
            Formula::Not(a) => !a.eval(values),
            Formula::And(a, b) => a.eval(values) && b.eval(values),
            Formula::Or(a, b) => a.eval(values) || b.eval(values),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Var(i) => write!(f, "x{i}"),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Var(usize),
    Not,
    And,
    Or,
    Open,
    Close,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedFormula(msg.into())
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => continue,
            '!' | '~' | '¬' => Token::Not,
            '&' | '∧' => Token::And,
            '|' | '∨' => Token::Or,
            '(' => Token::Open,
            ')' => Token::Close,
            'x' | 'X' => {
                let mut digits = String::new();
                while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                    digits.push(*d);
                    chars.next();
                }
                match digits.parse::<usize>() {
                    Ok(i) if i >= 1 => Token::Var(i),
                    _ => return Err(malformed(format!("bad variable x{digits}"))),
                }
            }
            c => return Err(malformed(format!("unexpected character {c:?}"))),
        };
        out.push(tok);
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.at).copied()
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while self.peek() == Some(Token::Or) {
            self.at += 1;
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while self.peek() == Some(Token::And) {
            self.at += 1;
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        let tok = self.peek().ok_or_else(|| malformed("unexpected end of formula"))?;
        self.at += 1;
        match tok {
            Token::Not => Ok(Formula::not(self.unary()?)),
            Token::Var(i) => Ok(Formula::Var(i)),
            Token::Open => {
                let f = self.or()?;
                if self.peek() != Some(Token::Close) {
                    return Err(malformed("missing ')'"));
                }
                self.at += 1;
                Ok(f)
            }
            t => Err(malformed(format!("unexpected {t:?}"))),
        }
    }
}

impl FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { tokens: tokenize(s)?, at: 0 };
        let f = p.or()?;
        if p.at != p.tokens.len() {
            return Err(malformed(format!("trailing {:?}", p.tokens[p.at])));
        }
        Ok(f)
    }
}

/// Satisfying assignments of `x1..xN`, by exhaustion.
pub fn sat_count(formula: &Formula) -> u64 {
    let n = formula.num_vars();
    (0..1u64 << n)
        .filter(|m| {
            let values: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            formula.eval(&values)
        })
        .count() as u64
}

/// Variables `0..N` carry `[1/2, 1/2]`; each connective gets an auxiliary
/// binary variable with a deterministic truth-table factor; the output
/// variable gets the indicator `[0, 1]`.
pub fn majsat_to_pgm(formula: &Formula) -> Result<Pgm> {
    let n = formula.num_vars();
    let mut cards = vec![2; n];
    let mut factors: Vec<Factor> = (0..n).map(|i| Factor::new(vec![i], vec![rat(1, 2), rat(1, 2)])).collect();
    let out = gadget(formula, &mut cards, &mut factors);
    factors.push(Factor::new(vec![out], vec![rat(0, 1), rat(1, 1)]));
    Pgm::new(cards, factors)
}

fn gadget(f: &Formula, cards: &mut Vec<usize>, factors: &mut Vec<Factor>) -> usize {
    let (inputs, table): (Vec<usize>, fn(&[bool]) -> bool) = match f {
        Formula::Var(i) => return i - 1,
        Formula::Not(a) => (vec![gadget(a, cards, factors)], |v| !v[0]),
        Formula::And(a, b) => (vec![gadget(a, cards, factors), gadget(b, cards, factors)], |v| v[0] && v[1]),
        Formula::Or(a, b) => (vec![gadget(a, cards, factors), gadget(b, cards, factors)], |v| v[0] || v[1]),
    };
    let aux = cards.len();
    cards.push(2);
    let k = inputs.len();
    let entries = (0..1usize << (k + 1))
        .map(|row| {
            // row bits: inputs high to low, then the output
            let v: Vec<bool> = (0..k).map(|j| row >> (k - j) & 1 == 1).collect();
            let o = row & 1 == 1;
            rat((table(&v) == o) as i64, 1)
        })
        .collect();
    let mut scope = inputs;
    if scope.len() == 2 && scope[0] == scope[1] {
        // x ∘ x: a single-input table over the shared variable
        let single = (0..4usize)
            .map(|row| {
                let x = row >> 1 == 1;
                rat((table(&[x, x]) == (row & 1 == 1)) as i64, 1)
            })
            .collect();
        factors.push(Factor::new(vec![scope[0], aux], single));
        return aux;
    }
    scope.push(aux);
    factors.push(Factor::new(scope, entries));
    aux
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::partition_function;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn z(s: &str) -> BigRational {
        partition_function(&majsat_to_pgm(&s.parse().unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(z("x1 & x2"), rat(1, 4));
        assert_eq!(z("x1 | !x1"), rat(1, 1));
        assert_eq!(z("x1 ∧ ¬x1"), rat(0, 1));
        assert_eq!(z("x1"), rat(1, 2));
        assert_eq!(z("x3"), rat(1, 2));
        assert_eq!(z("x1 & x1"), rat(1, 2));
    }

    #[test]
    fn parsing() {
        let f: Formula = "!x1 & x2 | x3".parse().unwrap();
        assert_eq!(f, Formula::or(Formula::and(Formula::not(Formula::var(1)), Formula::var(2)), Formula::var(3)));
        assert_eq!(f.to_string().parse::<Formula>().unwrap(), f);
        for bad in ["", "x0", "x1 &", "(x1", "x1 x2", "y1", "x1)"] {
            assert!(matches!(bad.parse::<Formula>(), Err(Error::MalformedFormula(_))), "{bad}");
        }
    }

    fn formula(vars: usize) -> impl Strategy<Value = Formula> {
        let leaf = (1..=vars).prop_map(Formula::Var);
        leaf.prop_recursive(3, 6, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn z_is_satisfying_fraction(f in formula(5)) {
            let pgm = majsat_to_pgm(&f).unwrap();
            let n = f.num_vars() as u32;
            prop_assert_eq!(partition_function(&pgm).unwrap(), rat(sat_count(&f) as i64, 1i64 << n));
        }
    }
}
