// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! The `WCPGM` text format.
//!
//! ```text
//! WCPGM
//! 2
//! 2 2
//! 2
//! 1 0
//! 1 1
//! 2 0 1
//! 1 0 0 1
//! ```

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;

use super::{Factor, FactorTable, Pgm};
use crate::arith::parse_rational;
use crate::error::{Error, Result};

fn parse(line: usize, msg: impl fmt::Display) -> Error {
    Error::parse(line, msg)
}

fn numbers<T: FromStr>(line: usize, text: &str) -> Result<Vec<T>> {
    text.split_whitespace()
        .map(|t| t.parse().map_err(|_| parse(line, format!("bad number {t:?}"))))
        .collect()
}

impl FromStr for Pgm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| lines.next().ok_or_else(|| parse(s.lines().count(), format!("missing {what}")));

        let (ln, magic) = next("header")?;
        if magic != "WCPGM" {
            return Err(parse(ln, "expected WCPGM header"));
        }
        let (ln, n) = next("variable count")?;
        let n: usize = n.parse().map_err(|_| parse(ln, "bad variable count"))?;
        let (ln, cards) = next("cardinalities")?;
        let cards: Vec<usize> = numbers(ln, cards)?;
        if cards.len() != n {
            return Err(parse(ln, format!("expected {n} cardinalities, found {}", cards.len())));
        }
        let (ln, m) = next("factor count")?;
        let m: usize = m.parse().map_err(|_| parse(ln, "bad factor count"))?;
        let mut factors = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, scope) = next("scope line")?;
            let scope: Vec<usize> = numbers(ln, scope)?;
            let Some((&s, scope)) = scope.split_first() else {
                return Err(parse(ln, "empty scope line"));
            };
            if scope.len() != s {
                return Err(parse(ln, format!("scope declares {s} variables, lists {}", scope.len())));
            }
            let (ln, table) = next("table line")?;
            let table = table
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|_| parse(ln, format!("bad rational {t:?}"))))
                .collect::<Result<Vec<BigRational>>>()?;
            factors.push(Factor::new(scope.to_vec(), table));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse(ln, "trailing content"));
        }
        Pgm::new(cards, factors)
    }
}

impl fmt::Display for Pgm {
    /// Oracle-backed factors are written with their evaluated tables.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(" ");
        writeln!(f, "WCPGM")?;
        writeln!(f, "{}", self.cards.len())?;
        writeln!(f, "{}", join(&mut self.cards.iter().map(|c| c.to_string())))?;
        writeln!(f, "{}", self.factors.len())?;
        for factor in &self.factors {
            let scope = std::iter::once(factor.scope.len()).chain(factor.scope.iter().copied());
            writeln!(f, "{}", join(&mut scope.map(|v| v.to_string())))?;
            let entries = match &factor.table {
                FactorTable::Explicit(t) => t.clone(),
                FactorTable::Oracle { .. } => factor.entries().map_err(|_| fmt::Error)?,
            };
            writeln!(f, "{}", join(&mut entries.iter().map(|e| e.to_string())))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::pgm::partition_function;

    const TWO_VAR: &str = "WCPGM\n2\n2 2\n2\n1 0\n1 1\n2 0 1\n1 0 0 1\n";

    #[test]
    fn parse_and_round_trip() {
        let p: Pgm = TWO_VAR.parse().unwrap();
        assert_eq!(partition_function(&p).unwrap(), rat(2, 1));
        assert_eq!(p.to_string(), TWO_VAR);
        let q: Pgm = "WCPGM\n1\n3\n1\n1 0\n1/2 1/3 1/6\n".parse().unwrap();
        assert_eq!(q.to_string().parse::<Pgm>().unwrap().to_string(), q.to_string());
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = "WCPGM\n2\n2 2\n1\n1 0\n1 x\n".parse::<Pgm>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 6, .. }), "{e:?}");
        let e = "PGM\n".parse::<Pgm>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = "WCPGM\n1\n2\n1\n2 0\n1 1\n".parse::<Pgm>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 5, .. }));
        let e = "WCPGM\n1\n2\n1\n1 0\n1 1 1\n".parse::<Pgm>().unwrap_err();
        assert!(matches!(e, Error::InvariantViolation(_)));
    }
}
