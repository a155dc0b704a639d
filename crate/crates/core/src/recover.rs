// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Recovering an exact rational output from an approximation interval.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{ceil, encoded_bits, floor, int, pow2};
use crate::bits::BitString;
use crate::counting::approx_sum;
use crate::error::{Error, Result};
use crate::oracle::WeightedCountingProblem;
use crate::poly::IntPolynomial;

/// The rational of least denominator in the closed interval `[lo, hi]`
/// (least absolute value among integers). Walks the Stern–Brocot tree one
/// continued-fraction term at a time.
pub fn simplest_in(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo <= hi, "empty interval");
    if !hi.is_positive() {
        if hi.is_zero() {
            return BigRational::zero();
        }
        return -simplest_in(&-hi, &-lo);
    }
    if !lo.is_positive() {
        return BigRational::zero();
    }
    // 0 < lo ≤ hi; collect continued-fraction terms shared by both endpoints
    let mut terms: Vec<BigInt> = Vec::new();
    let (mut lo, mut hi) = (lo.clone(), hi.clone());
    let tail = loop {
        let c = ceil(&lo);
        if int(c.clone()) <= hi {
            break c;
        }
        let n = floor(&lo);
        terms.push(n.clone());
        let (l, h) = (&lo - int(n.clone()), &hi - int(n));
        // lo, hi lie strictly inside (n, n+1) here
        lo = h.recip();
        hi = l.recip();
    };
    terms
        .iter()
        .rev()
        .fold(int(tail), |acc, n| int(n.clone()) + acc.recip())
}

/// The unique rational in `[lo, hi]` whose fraction encoding fits in `q` bits.
pub fn recover_rational(lo: &BigRational, hi: &BigRational, q: u64) -> Result<BigRational> {
    if lo > hi {
        return Err(Error::Precondition(format!("empty interval [{lo}, {hi}]")));
    }
    let r = simplest_in(lo, hi);
    if encoded_bits(&r) > q {
        return Err(Error::NoUniqueRational {
            lo: lo.to_string(),
            hi: hi.to_string(),
            bits: q,
        });
    }
    Ok(r)
}

/// Exact `f(x)` for problems whose output fits in `q(|x|)` bits, from a single
/// approximation at `b = 2q + 2`.
pub fn solve_bounded_output(
    problem: &WeightedCountingProblem,
    x: &BitString,
    q: &IntPolynomial,
) -> Result<BigRational> {
    let bits = q.eval(x.len() as u64);
    let b = u32::try_from(2 * bits + 2)
        .map_err(|_| Error::Precondition(format!("output bound {bits} too large")))?;
    let center = approx_sum(problem, x, b)?.to_rational();
    let radius = BigRational::new(BigInt::one(), pow2(b));
    recover_rational(&(&center - &radius), &(&center + &radius), bits)
}
