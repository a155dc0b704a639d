// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

/// Polynomial with natural coefficients, lowest degree first. Evaluation
/// saturates at `u64::MAX`, which any enumeration cap rejects anyway.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<u64>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial::new(Vec::new())
    }

    pub fn constant(c: u64) -> Self {
        IntPolynomial::new(vec![c])
    }

    /// `n ↦ n`
    pub fn identity() -> Self {
        IntPolynomial::new(vec![0, 1])
    }

    /// `n ↦ n + c`
    pub fn shift(c: u64) -> Self {
        IntPolynomial::new(vec![c, 1])
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, n: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc.saturating_mul(n).saturating_add(c))
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0)
                        .saturating_add(other.coeffs.get(i).copied().unwrap_or(0))
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].saturating_add(a.saturating_mul(b));
            }
        }
        IntPolynomial::new(out)
    }

    pub fn scale(&self, c: u64) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|&a| a.saturating_mul(c)).collect())
    }

    /// Coefficient-wise maximum; dominates both operands at every `n ≥ 0`.
    pub fn max(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new(
            (0..len)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(0)
                        .max(other.coeffs.get(i).copied().unwrap_or(0))
                })
                .collect(),
        )
    }

    /// `n ↦ self(inner(n))`
    pub fn compose(&self, inner: &IntPolynomial) -> IntPolynomial {
        self.coeffs.iter().rev().fold(IntPolynomial::zero(), |acc, &c| {
            acc.mul(inner).add(&IntPolynomial::constant(c))
        })
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("n")?,
                (1, c) => write!(f, "{c}n")?,
                (i, 1) => write!(f, "n^{i}")?,
                (i, c) => write!(f, "{c}n^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPolynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_display() {
        let p = IntPolynomial::new(vec![1, 0, 3, 0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(2), 13);
        assert_eq!(p.to_string(), "3n^2 + 1");
        assert_eq!(IntPolynomial::zero().eval(5), 0);
    }

    #[test]
    fn composition() {
        let p = IntPolynomial::new(vec![0, 0, 1]); // n²
        let q = IntPolynomial::shift(2); // n + 2
        assert_eq!(p.compose(&q).eval(3), 25);
        assert_eq!(q.compose(&p).eval(3), 11);
    }

    #[test]
    fn max_dominates() {
        let a = IntPolynomial::new(vec![5, 1]);
        let b = IntPolynomial::new(vec![0, 0, 1]);
        let m = a.max(&b);
        for n in 0..20 {
            assert!(m.eval(n) >= a.eval(n) && m.eval(n) >= b.eval(n));
        }
    }

    #[test]
    fn saturates() {
        let p = IntPolynomial::new(vec![0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(p.eval(1 << 20), u64::MAX);
    }
}
