// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

use num_rational::BigRational;

use crate::bits::BitString;
use crate::counting::approx_sum_above;
use crate::error::{Error, Result};
use crate::oracle::WeightedCountingProblem;
use crate::poly::IntPolynomial;

/// Does `f(x) ≥ threshold`? `output_bit_bound(|x|)` bounds the fraction
/// encoding of the exact `f(x)`.
#[derive(Clone, Debug)]
pub struct DecisionInstance {
    pub problem: WeightedCountingProblem,
    pub threshold: BigRational,
    pub output_bit_bound: Option<IntPolynomial>,
}

impl DecisionInstance {
    pub fn new(
        problem: WeightedCountingProblem,
        threshold: BigRational,
        output_bit_bound: IntPolynomial,
    ) -> Self {
        DecisionInstance {
            problem,
            threshold,
            output_bit_bound: Some(output_bit_bound),
        }
    }
}

/// Decides `f(x) ≥ t` from a single one-sided approximation.
///
/// An output of at most `q` bits has denominator below `2^q`, so when
/// `f(x) < t` the gap `t − f(x)` is at least `2^{-(q + bits(den t))}`; an
/// upper approximation with error `2^{-c}`, `c = q + bits(den t) + 1`, stays
/// below `t`.
pub fn decide_threshold(instance: &DecisionInstance, x: &BitString) -> Result<bool> {
    let bound = instance.output_bit_bound.as_ref().ok_or(Error::MissingBound)?;
    let q = bound.eval(x.len() as u64);
    let den_bits = instance.threshold.denom().bits();
    let c = u32::try_from(q + den_bits + 1)
        .map_err(|_| Error::Precondition(format!("output bound {q} too large")))?;
    let above = approx_sum_above(&instance.problem, x, c)?;
    Ok(above.to_rational() >= instance.threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::oracle::RangeTag;

    fn third(p: u64) -> WeightedCountingProblem {
        WeightedCountingProblem::from_fn(IntPolynomial::constant(p), RangeTag::QPoly, |_, _| {
            rat(1, 3)
        })
    }

    #[test]
    fn examples() {
        let x = BitString::new();
        let q = IntPolynomial::constant(8);
        let four_thirds = DecisionInstance::new(third(2), rat(1, 1), q.clone());
        assert!(decide_threshold(&four_thirds, &x).unwrap());
        let zero = DecisionInstance::new(
            WeightedCountingProblem::zero(IntPolynomial::constant(2)),
            rat(1, 1),
            q.clone(),
        );
        assert!(!decide_threshold(&zero, &x).unwrap());
        let boundary = DecisionInstance::new(third(2), rat(4, 3), q);
        assert!(decide_threshold(&boundary, &x).unwrap());
    }

    #[test]
    fn just_below_rational_threshold() {
        // f = 4/3 < t = 4/3 + 1/1000; the threshold's denominator widens the gap
        let x = BitString::new();
        let inst = DecisionInstance::new(third(2), rat(4, 3) + rat(1, 1000), IntPolynomial::constant(4));
        assert!(!decide_threshold(&inst, &x).unwrap());
    }

    #[test]
    fn missing_bound() {
        let inst = DecisionInstance {
            problem: third(1),
            threshold: rat(0, 1),
            output_bit_bound: None,
        };
        assert_eq!(decide_threshold(&inst, &BitString::new()), Err(Error::MissingBound));
    }
}
