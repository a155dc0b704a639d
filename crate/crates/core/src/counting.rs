// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact and approximate summation over the path space.
//!
//! Enumeration is split across rayon workers for larger path spaces. Exact
//! addition is associative and commutative, so every reduction order gives
//! the same canonical result.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::arith::{pow2, Dyadic};
use crate::bits::BitString;
use crate::error::Result;
use crate::oracle::WeightedCountingProblem;
use crate::quadratic::QSqrt2;

const PARALLEL_THRESHOLD_BITS: usize = 10;

/// Folds `term(u)` over every `u ∈ {0,1}^len`.
pub(crate) fn sum_over_paths<T, F, A>(len: usize, term: F, add: A) -> Result<T>
where
    T: Send + Default,
    F: Fn(&BitString) -> Result<T> + Sync,
    A: Fn(T, T) -> T + Sync + Send,
{
    assert!(len < 64);
    let n = 1u64 << len;
    if len < PARALLEL_THRESHOLD_BITS {
        let mut acc = T::default();
        for v in 0..n {
            acc = add(acc, term(&BitString::from_u64(v, len))?);
        }
        return Ok(acc);
    }
    (0..n)
        .into_par_iter()
        .map(|v| term(&BitString::from_u64(v, len)))
        .try_fold(T::default, |acc, t| Ok(add(acc, t?)))
        .try_reduce(T::default, |a, b| Ok(add(a, b)))
}

/// `f(x)` exactly. Requires an exact weight map.
pub fn exact_sum(problem: &WeightedCountingProblem, x: &BitString) -> Result<BigRational> {
    let len = problem.checked_path_len(x)?;
    if !problem.oracle().has_exact() {
        return Err(crate::Error::ExactUnavailable);
    }
    sum_over_paths(len, |u| problem.weight(x, u), |a, b| a + b)
}

/// `f(x)` exactly in ℚ(√2), for oracles with irrational weights.
pub fn exact_sum_quadratic(problem: &WeightedCountingProblem, x: &BitString) -> Result<QSqrt2> {
    let len = problem.checked_path_len(x)?;
    if !problem.oracle().has_exact_quadratic() {
        return Err(crate::Error::ExactUnavailable);
    }
    sum_over_paths(
        len,
        |u| problem.oracle().exact_quadratic(x, u),
        |a, b| &a + &b,
    )
}

/// Dyadic value within `2^{-b}` of `f(x)`: every weight is approximated at
/// precision `p(|x|) + b`, so the `2^{p(|x|)}` errors add up to at most `2^{-b}`.
pub fn approx_sum(problem: &WeightedCountingProblem, x: &BitString, b: u32) -> Result<Dyadic> {
    let len = problem.checked_path_len(x)?;
    let precision = len as u32 + b;
    let total = sum_over_paths(
        len,
        |u| problem.approx_weight(x, u, precision),
        |a: BigInt, b| a + b,
    )?;
    Ok(Dyadic::new(total, precision))
}

/// One-sided approximation with `0 ≤ result − f(x) ≤ 2^{-c}`.
///
/// Each weight is computed with one extra bit and bumped by one unit in the
/// last place, which puts it above the true weight by at most `2^{-(p+c)}`.
/// Weights the exact map confirms to be represented exactly are not bumped.
pub fn approx_sum_above(
    problem: &WeightedCountingProblem,
    x: &BitString,
    c: u32,
) -> Result<Dyadic> {
    let len = problem.checked_path_len(x)?;
    let precision = len as u32 + c + 1;
    let exact = problem.oracle().has_exact();
    let total = sum_over_paths(
        len,
        |u| {
            let v = problem.approx_weight(x, u, precision)?;
            if exact && problem.weight(x, u)? == BigRational::new(v.clone(), pow2(precision)) {
                Ok(v)
            } else {
                Ok(v + 1)
            }
        },
        |a: BigInt, b| a + b,
    )?;
    Ok(Dyadic::new(total, precision))
}
