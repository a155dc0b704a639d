// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Affine reductions between weight classes.
//!
//! Natural and integer weights are unfolded into extra path bits; binary,
//! signed and ternary classes are related by affine corrections
//! `f(x) = h1(x)·g(h2(x)) + h3(x)`.

use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, pow2};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{FallibleOracle, RangeTag, WeightedCountingProblem};
use crate::poly::IntPolynomial;

type InputMap = Arc<dyn Fn(&BitString) -> BitString + Send + Sync>;
type RationalMap = Arc<dyn Fn(&BitString) -> BigRational + Send + Sync>;

/// `f(x) = scale(x) · g(input_map(x)) + offset(x)`.
#[derive(Clone)]
pub struct AffineReduction {
    input_map: InputMap,
    scale: RationalMap,
    offset: RationalMap,
}

impl AffineReduction {
    pub fn new(
        input_map: impl Fn(&BitString) -> BitString + Send + Sync + 'static,
        scale: impl Fn(&BitString) -> BigRational + Send + Sync + 'static,
        offset: impl Fn(&BitString) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        AffineReduction {
            input_map: Arc::new(input_map),
            scale: Arc::new(scale),
            offset: Arc::new(offset),
        }
    }

    /// Constant scale and offset, identity input map.
    pub fn constant(scale: BigRational, offset: BigRational) -> Self {
        Self::new(|x| x.clone(), move |_| scale.clone(), move |_| offset.clone())
    }

    pub fn identity() -> Self {
        Self::constant(BigRational::one(), BigRational::zero())
    }

    pub fn input_map(&self, x: &BitString) -> BitString {
        (self.input_map)(x)
    }

    pub fn scale(&self, x: &BitString) -> BigRational {
        (self.scale)(x)
    }

    pub fn offset(&self, x: &BitString) -> BigRational {
        (self.offset)(x)
    }

    /// `self` followed by `inner`: if `f = self[g]` and `g = inner[h]`, the
    /// result expresses `f` through `h`.
    pub fn then(&self, inner: &AffineReduction) -> AffineReduction {
        let (outer, inner) = (self.clone(), inner.clone());
        let (o2, i2) = (outer.clone(), inner.clone());
        let (o3, i3) = (outer.clone(), inner.clone());
        AffineReduction::new(
            move |x| inner.input_map(&outer.input_map(x)),
            move |x| o2.scale(x) * i2.scale(&o2.input_map(x)),
            move |x| o3.scale(x) * i3.offset(&o3.input_map(x)) + o3.offset(x),
        )
    }
}

pub fn apply_reduction(red: &AffineReduction, g_value: &BigRational, x: &BitString) -> BigRational {
    red.scale(x) * g_value + red.offset(x)
}

/// Shared unfolding for natural and integer weights: path `u1 ++ u2` has
/// weight `sign(w(x,u1))` when `#u2 < |w(x,u1)|`.
fn unfold(
    problem: &WeightedCountingProblem,
    bit_bound: &IntPolynomial,
    tag: RangeTag,
) -> WeightedCountingProblem {
    let inner = problem.clone();
    let q = bit_bound.clone();
    let path_poly = problem.path_poly().add(bit_bound);
    let oracle = FallibleOracle::new(tag, move |x, u| {
        let p = inner.path_len(x) as usize;
        let (u1, u2) = u.split_at(p);
        let w = inner.weight(x, &u1)?;
        let bits = q.eval(x.len() as u64) as u32;
        if !w.is_integer() || w.abs() >= int(pow2(bits)) {
            return Err(Error::BoundViolated {
                weight: w.to_string(),
                bits: bits as u64,
            });
        }
        let n = BigInt::from_biguint(Sign::Plus, u2.to_natural());
        Ok(if n < w.numer().abs() {
            int(w.numer().signum())
        } else {
            BigRational::zero()
        })
    });
    WeightedCountingProblem::new(path_poly, oracle).with_cap(problem.cap_log2())
}

/// Natural weights below `2^{q(|x|)}` as a {0,1} problem with path polynomial `p + q`.
pub fn lift_nat_to_binary(
    problem: &WeightedCountingProblem,
    bit_bound: &IntPolynomial,
) -> Result<WeightedCountingProblem> {
    problem.require_tag(RangeTag::Nat)?;
    Ok(unfold(problem, bit_bound, RangeTag::B01))
}

/// Integer weights with `|w| < 2^{q(|x|)}` as a {−1,0,1} problem.
pub fn lift_int_to_ternary(
    problem: &WeightedCountingProblem,
    bit_bound: &IntPolynomial,
) -> Result<WeightedCountingProblem> {
    problem.require_tag(RangeTag::Int)?;
    Ok(unfold(problem, bit_bound, RangeTag::T101))
}

fn mapped(
    problem: &WeightedCountingProblem,
    tag: RangeTag,
    f: impl Fn(BigRational) -> BigRational + Send + Sync + 'static,
) -> WeightedCountingProblem {
    let inner = problem.clone();
    let oracle = FallibleOracle::new(tag, move |x, u| Ok(f(inner.weight(x, u)?)));
    WeightedCountingProblem::new(problem.path_poly().clone(), oracle).with_cap(problem.cap_log2())
}

fn two_to_path_len(path_poly: &IntPolynomial, x: &BitString) -> BigRational {
    int(pow2(path_poly.eval(x.len() as u64) as u32))
}

/// Weights `2w − 1 ∈ {−1, 1}`; recovers `f(x) = g(x)/2 + 2^{p(|x|)−1}`.
pub fn embed_binary_in_pm1(
    problem: &WeightedCountingProblem,
) -> Result<(WeightedCountingProblem, AffineReduction)> {
    problem.require_tag(RangeTag::B01)?;
    let embedded = mapped(problem, RangeTag::PM1, |w| w * int(2) - BigRational::one());
    let p = problem.path_poly().clone();
    let half = BigRational::new(1.into(), 2.into());
    let red = AffineReduction::new(
        |x| x.clone(),
        move |_| half.clone(),
        move |x| two_to_path_len(&p, x) / int(2),
    );
    Ok((embedded, red))
}

/// Weights `w + 1 ∈ {0, 1, 2}`; recovers `f(x) = g(x) − 2^{p(|x|)}`.
pub fn embed_ternary_in_nat(
    problem: &WeightedCountingProblem,
) -> Result<(WeightedCountingProblem, AffineReduction)> {
    problem.require_tag(RangeTag::T101)?;
    let embedded = mapped(problem, RangeTag::Nat, |w| w + BigRational::one());
    let p = problem.path_poly().clone();
    let red = AffineReduction::new(
        |x| x.clone(),
        |_| BigRational::one(),
        move |x| -two_to_path_len(&p, x),
    );
    Ok((embedded, red))
}

/// Integer weights below `2^{q(|x|)}` in magnitude as a {0,1} problem:
/// unfold to {−1,0,1}, shift to {0,1,2}, unfold again with two bits.
pub fn int_to_binary(
    problem: &WeightedCountingProblem,
    bit_bound: &IntPolynomial,
) -> Result<(WeightedCountingProblem, AffineReduction)> {
    let ternary = lift_int_to_ternary(problem, bit_bound)?;
    let (nat, red) = embed_ternary_in_nat(&ternary)?;
    let binary = lift_nat_to_binary(&nat, &IntPolynomial::constant(2))?;
    Ok((binary, red))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::counting::exact_sum;
    use crate::oracle::check_tag;
    use proptest::prelude::*;

    fn table(tag: RangeTag, p: u64, ws: Vec<i64>) -> WeightedCountingProblem {
        WeightedCountingProblem::from_fn(IntPolynomial::constant(p), tag, move |_, u| {
            int(ws[u.to_u64() as usize])
        })
    }

    fn x() -> BitString {
        BitString::new()
    }

    #[test]
    fn nat_lift_examples() {
        let lifted = lift_nat_to_binary(&table(RangeTag::Nat, 1, vec![3, 0]), &IntPolynomial::constant(2)).unwrap();
        assert_eq!(lifted.path_len(&x()), 3);
        assert_eq!(exact_sum(&lifted, &x()).unwrap(), rat(3, 1));
        assert!(check_tag(&lifted, &x()).unwrap());
        let zero = lift_nat_to_binary(&table(RangeTag::Nat, 2, vec![0; 4]), &IntPolynomial::constant(1)).unwrap();
        assert!(exact_sum(&zero, &x()).unwrap().is_zero());
        let ones = lift_nat_to_binary(&table(RangeTag::Nat, 2, vec![1; 4]), &IntPolynomial::constant(1)).unwrap();
        assert_eq!(exact_sum(&ones, &x()).unwrap(), rat(4, 1));
    }

    #[test]
    fn bound_violation() {
        let lifted = lift_nat_to_binary(&table(RangeTag::Nat, 1, vec![4, 0]), &IntPolynomial::constant(2)).unwrap();
        assert!(matches!(exact_sum(&lifted, &x()), Err(Error::BoundViolated { .. })));
        assert!(matches!(
            lift_nat_to_binary(&table(RangeTag::Int, 1, vec![1, 0]), &IntPolynomial::constant(2)),
            Err(Error::TagMismatch { .. })
        ));
    }

    #[test]
    fn int_lift_examples() {
        let q = IntPolynomial::constant(2);
        let l = lift_int_to_ternary(&table(RangeTag::Int, 1, vec![-3, 2]), &q).unwrap();
        assert_eq!(exact_sum(&l, &x()).unwrap(), rat(-1, 1));
        assert!(check_tag(&l, &x()).unwrap());
        let l = lift_int_to_ternary(&table(RangeTag::Int, 1, vec![-1, 1]), &q).unwrap();
        assert!(exact_sum(&l, &x()).unwrap().is_zero());
    }

    #[test]
    fn embedding_examples() {
        let cases = [(vec![1, 1, 1, 1], 4, 4), (vec![0, 0, 0, 0], -4, 0)];
        for (ws, g, f) in cases {
            let (e, red) = embed_binary_in_pm1(&table(RangeTag::B01, 2, ws)).unwrap();
            let gv = exact_sum(&e, &x()).unwrap();
            assert_eq!(gv, rat(g, 1));
            assert_eq!(apply_reduction(&red, &gv, &x()), rat(f, 1));
        }
        let (e, red) = embed_binary_in_pm1(&table(RangeTag::B01, 1, vec![1, 0])).unwrap();
        let gv = exact_sum(&e, &x()).unwrap();
        assert!(gv.is_zero());
        assert_eq!(apply_reduction(&red, &gv, &x()), rat(1, 1));

        let cases = [(1, vec![-1, 1], 2, 0), (2, vec![-1; 4], 0, -4), (2, vec![1, 0, -1, 1], 5, 1)];
        for (p, ws, g, f) in cases {
            let (e, red) = embed_ternary_in_nat(&table(RangeTag::T101, p, ws)).unwrap();
            let gv = exact_sum(&e, &x()).unwrap();
            assert_eq!(gv, rat(g, 1));
            assert_eq!(apply_reduction(&red, &gv, &x()), rat(f, 1));
            assert!(check_tag(&e, &x()).unwrap());
        }
    }

    #[test]
    fn apply_examples() {
        let id = AffineReduction::identity();
        assert_eq!(apply_reduction(&id, &rat(7, 1), &x()), rat(7, 1));
        let r = AffineReduction::constant(rat(1, 2), rat(2, 1));
        assert_eq!(apply_reduction(&r, &rat(4, 1), &x()), rat(4, 1));
        let r = AffineReduction::constant(rat(1, 1), rat(-4, 1));
        assert_eq!(apply_reduction(&r, &rat(0, 1), &x()), rat(-4, 1));
    }

    #[test]
    fn composition_of_reductions() {
        let a = AffineReduction::constant(rat(2, 1), rat(1, 1));
        let b = AffineReduction::constant(rat(1, 3), rat(-1, 1));
        let g = rat(9, 1);
        let composed = a.then(&b);
        let via = apply_reduction(&a, &apply_reduction(&b, &g, &x()), &x());
        assert_eq!(apply_reduction(&composed, &g, &x()), via);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn int_round_trip(p in 0u64..4, seed in proptest::collection::vec(-7i64..8, 16)) {
            let ws: Vec<i64> = seed[..1 << p].to_vec();
            let orig = table(RangeTag::Int, p, ws);
            let (bin, red) = int_to_binary(&orig, &IntPolynomial::constant(3)).unwrap();
            prop_assert_eq!(bin.path_len(&x()), p + 3 + 2);
            prop_assert!(check_tag(&bin, &x()).unwrap());
            let g = exact_sum(&bin, &x()).unwrap();
            prop_assert_eq!(apply_reduction(&red, &g, &x()), exact_sum(&orig, &x()).unwrap());
        }

        #[test]
        fn binary_round_trip(p in 0u64..5, seed in proptest::collection::vec(0i64..2, 16)) {
            let ws: Vec<i64> = seed[..1 << p].to_vec();
            let orig = table(RangeTag::B01, p, ws);
            let (pm, red) = embed_binary_in_pm1(&orig).unwrap();
            prop_assert!(check_tag(&pm, &x()).unwrap());
            prop_assert_eq!(pm.path_poly(), orig.path_poly());
            let g = exact_sum(&pm, &x()).unwrap();
            prop_assert_eq!(apply_reduction(&red, &g, &x()), exact_sum(&orig, &x()).unwrap());
        }
    }
}
