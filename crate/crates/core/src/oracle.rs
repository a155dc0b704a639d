// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Weight oracles and weighted counting problems.
//!
//! A [`WeightOracle`] pairs an integer approximation `approx(x, u, b)` with an
//! optional exact weight `w(x, u)` such that `|w − approx/2^b| ≤ 2^{-b}` for every
//! precision `b`. A [`WeightedCountingProblem`] adds the path polynomial `p`
//! and represents `f(x) = Σ_{u ∈ {0,1}^{p(|x|)}} w(x, u)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith::{ceil_log2, scaled_nearest};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::poly::IntPolynomial;
use crate::quadratic::QSqrt2;

/// Default enumeration cap: at most 2^24 weights per sum.
pub const DEFAULT_CAP_LOG2: u32 = 24;

/// The declared weight range of an oracle. Tags are checked, never inferred:
/// a `B01` oracle is not accepted where `T101` is required unless retagged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RangeTag {
    /// {0, 1}
    B01,
    /// {−1, 1}
    PM1,
    /// {−1, 0, 1}
    T101,
    /// ℕ
    Nat,
    /// ℤ
    Int,
    /// polynomial-time computable rationals
    QPoly,
    /// efficiently approximable reals
    Real,
}

impl RangeTag {
    pub const ALL: [RangeTag; 7] = [
        RangeTag::B01,
        RangeTag::PM1,
        RangeTag::T101,
        RangeTag::Nat,
        RangeTag::Int,
        RangeTag::QPoly,
        RangeTag::Real,
    ];

    pub fn contains(self, w: &BigRational) -> bool {
        let is = |n: i64| *w == BigRational::from_integer(BigInt::from(n));
        match self {
            RangeTag::B01 => is(0) || is(1),
            RangeTag::PM1 => is(-1) || is(1),
            RangeTag::T101 => is(-1) || is(0) || is(1),
            RangeTag::Nat => w.is_integer() && !w.is_negative(),
            RangeTag::Int => w.is_integer(),
            RangeTag::QPoly | RangeTag::Real => true,
        }
    }

    /// Whether oracles with this tag must carry an exact map.
    pub fn requires_exact(self) -> bool {
        !matches!(self, RangeTag::QPoly | RangeTag::Real)
    }

    /// `log2` of a magnitude bound implied by the tag alone.
    pub fn magnitude_bits(self) -> Option<u32> {
        match self {
            RangeTag::B01 | RangeTag::PM1 | RangeTag::T101 => Some(0),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RangeTag::B01 => "B01",
            RangeTag::PM1 => "PM1",
            RangeTag::T101 => "T101",
            RangeTag::Nat => "NAT",
            RangeTag::Int => "INT",
            RangeTag::QPoly => "QPOLY",
            RangeTag::Real => "REAL",
        }
    }
}

impl fmt::Display for RangeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub trait WeightOracle: Send + Sync {
    fn range_tag(&self) -> RangeTag;

    /// Integer `v` with `|w(x,u) − v/2^b| ≤ 2^{-b}`. Must be deterministic.
    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt>;

    fn has_exact(&self) -> bool {
        false
    }

    fn exact(&self, _x: &BitString, _u: &BitString) -> Result<BigRational> {
        Err(Error::ExactUnavailable)
    }

    /// Exact weight in ℚ(√2). Oracles whose weights can be irrational override this.
    fn exact_quadratic(&self, x: &BitString, u: &BitString) -> Result<QSqrt2> {
        self.exact(x, u).map(QSqrt2::from)
    }

    fn has_exact_quadratic(&self) -> bool {
        self.has_exact()
    }

    /// `a` such that `|w(x,u)| ≤ 2^a` for every path `u`, when known. The
    /// bound may depend on `|x|` but not on the bits of `x`.
    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        self.range_tag().magnitude_bits()
    }
}

pub type ExactFn = Arc<dyn Fn(&BitString, &BitString) -> BigRational + Send + Sync>;
pub type ApproxFn = Arc<dyn Fn(&BitString, &BitString, u32) -> BigInt + Send + Sync>;
pub type FallibleFn = Arc<dyn Fn(&BitString, &BitString) -> Result<BigRational> + Send + Sync>;

/// Oracle backed by an exact rational weight function; approximations are
/// nearest-rounded with ties toward −∞.
#[derive(Clone)]
pub struct RationalOracle {
    tag: RangeTag,
    weight: ExactFn,
    magnitude_bits: Option<u32>,
}

impl RationalOracle {
    pub fn new(
        tag: RangeTag,
        weight: impl Fn(&BitString, &BitString) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        RationalOracle {
            tag,
            weight: Arc::new(weight),
            magnitude_bits: tag.magnitude_bits(),
        }
    }

    pub fn with_magnitude_bits(mut self, bits: u32) -> Self {
        self.magnitude_bits = Some(bits);
        self
    }
}

impl WeightOracle for RationalOracle {
    fn range_tag(&self) -> RangeTag {
        self.tag
    }

    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        Ok(scaled_nearest(&(self.weight)(x, u), b))
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn exact(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        Ok((self.weight)(x, u))
    }

    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        self.magnitude_bits
    }
}

/// Like [`RationalOracle`], but the weight map may fail (for instance when a
/// caller-supplied bound turns out to be violated on some path).
#[derive(Clone)]
pub struct FallibleOracle {
    tag: RangeTag,
    weight: FallibleFn,
    magnitude_bits: Option<u32>,
}

impl FallibleOracle {
    pub fn new(
        tag: RangeTag,
        weight: impl Fn(&BitString, &BitString) -> Result<BigRational> + Send + Sync + 'static,
    ) -> Self {
        FallibleOracle {
            tag,
            weight: Arc::new(weight),
            magnitude_bits: tag.magnitude_bits(),
        }
    }

    pub fn with_magnitude_bits(mut self, bits: Option<u32>) -> Self {
        self.magnitude_bits = bits.or(self.tag.magnitude_bits());
        self
    }
}

impl WeightOracle for FallibleOracle {
    fn range_tag(&self) -> RangeTag {
        self.tag
    }

    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        Ok(scaled_nearest(&(self.weight)(x, u)?, b))
    }

    fn has_exact(&self) -> bool {
        true
    }

    fn exact(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        (self.weight)(x, u)
    }

    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        self.magnitude_bits
    }
}

/// Oracle given by an arbitrary approximation function, optionally paired
/// with an exact map.
#[derive(Clone)]
pub struct ApproxOracle {
    tag: RangeTag,
    approx: ApproxFn,
    exact: Option<ExactFn>,
    magnitude_bits: Option<u32>,
}

impl ApproxOracle {
    pub fn new(
        tag: RangeTag,
        approx: impl Fn(&BitString, &BitString, u32) -> BigInt + Send + Sync + 'static,
        exact: Option<ExactFn>,
    ) -> Result<Self> {
        if tag.requires_exact() && exact.is_none() {
            return Err(Error::Precondition(format!(
                "{tag} oracles must carry an exact weight map"
            )));
        }
        Ok(ApproxOracle {
            tag,
            approx: Arc::new(approx),
            exact,
            magnitude_bits: tag.magnitude_bits(),
        })
    }

    pub fn with_magnitude_bits(mut self, bits: u32) -> Self {
        self.magnitude_bits = Some(bits);
        self
    }
}

impl WeightOracle for ApproxOracle {
    fn range_tag(&self) -> RangeTag {
        self.tag
    }

    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        Ok((self.approx)(x, u, b))
    }

    fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn exact(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        self.exact
            .as_ref()
            .map(|f| f(x, u))
            .ok_or(Error::ExactUnavailable)
    }

    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        self.magnitude_bits
    }
}

/// `f(x) = Σ_{u ∈ {0,1}^{p(|x|)}} w(x, u)`.
#[derive(Clone)]
pub struct WeightedCountingProblem {
    path_poly: IntPolynomial,
    oracle: Arc<dyn WeightOracle>,
    cap_log2: u32,
}

impl fmt::Debug for WeightedCountingProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightedCountingProblem")
            .field("path_poly", &self.path_poly)
            .field("tag", &self.tag())
            .field("cap_log2", &self.cap_log2)
            .finish()
    }
}

impl WeightedCountingProblem {
    pub fn new(path_poly: IntPolynomial, oracle: impl WeightOracle + 'static) -> Self {
        Self::from_arc(path_poly, Arc::new(oracle))
    }

    pub fn from_arc(path_poly: IntPolynomial, oracle: Arc<dyn WeightOracle>) -> Self {
        WeightedCountingProblem {
            path_poly,
            oracle,
            cap_log2: DEFAULT_CAP_LOG2,
        }
    }

    /// Problem with exact rational weights `weight(x, u)`.
    pub fn from_fn(
        path_poly: IntPolynomial,
        tag: RangeTag,
        weight: impl Fn(&BitString, &BitString) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        Self::new(path_poly, RationalOracle::new(tag, weight))
    }

    /// Every path carries the same weight `c`.
    pub fn constant(path_poly: IntPolynomial, c: BigRational) -> Self {
        let tag = [RangeTag::B01, RangeTag::PM1, RangeTag::Nat, RangeTag::Int]
            .into_iter()
            .find(|t| t.contains(&c))
            .unwrap_or(RangeTag::QPoly);
        let bits = ceil_log2(&c);
        let oracle = RationalOracle::new(tag, move |_, _| c.clone()).with_magnitude_bits(bits);
        Self::new(path_poly, oracle)
    }

    /// Path length 0 and the single weight `value`: `f(x) = value` for all `x`.
    pub fn value(value: BigRational) -> Self {
        Self::constant(IntPolynomial::zero(), value)
    }

    pub fn zero(path_poly: IntPolynomial) -> Self {
        Self::from_fn(path_poly, RangeTag::B01, |_, _| BigRational::zero())
    }

    pub fn with_cap(mut self, cap_log2: u32) -> Self {
        self.cap_log2 = cap_log2;
        self
    }

    pub fn cap_log2(&self) -> u32 {
        self.cap_log2
    }

    pub fn path_poly(&self) -> &IntPolynomial {
        &self.path_poly
    }

    pub fn oracle(&self) -> &Arc<dyn WeightOracle> {
        &self.oracle
    }

    pub fn tag(&self) -> RangeTag {
        self.oracle.range_tag()
    }

    pub fn path_len(&self, x: &BitString) -> u64 {
        self.path_poly.eval(x.len() as u64)
    }

    /// Path length for `x`, rejected when the path space exceeds the cap.
    pub fn checked_path_len(&self, x: &BitString) -> Result<usize> {
        let len = self.path_len(x);
        if len > self.cap_log2 as u64 {
            return Err(Error::CapExceeded {
                needed: len,
                cap: self.cap_log2,
            });
        }
        Ok(len as usize)
    }

    pub fn weight(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        self.oracle.exact(x, u)
    }

    pub fn approx_weight(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        self.oracle.approx(x, u, b)
    }

    /// Same problem under a different tag. The caller vouches for the range;
    /// [`check_tag`] verifies it on a given input.
    pub fn retag(&self, tag: RangeTag) -> Self {
        WeightedCountingProblem {
            path_poly: self.path_poly.clone(),
            oracle: Arc::new(Retagged {
                inner: self.oracle.clone(),
                tag,
                magnitude_bits: None,
            }),
            cap_log2: self.cap_log2,
        }
    }

    /// Attaches a caller-supplied magnitude bound `|w| ≤ 2^bits`.
    pub fn with_magnitude_bits(&self, bits: u32) -> Self {
        WeightedCountingProblem {
            path_poly: self.path_poly.clone(),
            oracle: Arc::new(Retagged {
                inner: self.oracle.clone(),
                tag: self.tag(),
                magnitude_bits: Some(bits),
            }),
            cap_log2: self.cap_log2,
        }
    }

    pub fn require_tag(&self, tag: RangeTag) -> Result<()> {
        if self.tag() == tag {
            Ok(())
        } else {
            Err(Error::TagMismatch {
                expected: tag,
                found: self.tag(),
            })
        }
    }
}

struct Retagged {
    inner: Arc<dyn WeightOracle>,
    tag: RangeTag,
    magnitude_bits: Option<u32>,
}

impl WeightOracle for Retagged {
    fn range_tag(&self) -> RangeTag {
        self.tag
    }
    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        self.inner.approx(x, u, b)
    }
    fn has_exact(&self) -> bool {
        self.inner.has_exact()
    }
    fn exact(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        self.inner.exact(x, u)
    }
    fn exact_quadratic(&self, x: &BitString, u: &BitString) -> Result<QSqrt2> {
        self.inner.exact_quadratic(x, u)
    }
    fn has_exact_quadratic(&self) -> bool {
        self.inner.has_exact_quadratic()
    }
    fn magnitude_bits(&self, x: &BitString) -> Option<u32> {
        self.magnitude_bits
            .or_else(|| self.tag.magnitude_bits())
            .or_else(|| self.inner.magnitude_bits(x))
    }
}

/// Scans every path of `x` and checks that each exact weight lies in the tagged set.
pub fn check_tag(problem: &WeightedCountingProblem, x: &BitString) -> Result<bool> {
    let len = problem.checked_path_len(x)?;
    let tag = problem.tag();
    for u in BitString::all(len) {
        if !tag.contains(&problem.weight(x, &u)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest `|w(x,u)|` over all paths, for callers that need a concrete bound.
pub fn max_abs_weight(problem: &WeightedCountingProblem, x: &BitString) -> Result<BigRational> {
    let len = problem.checked_path_len(x)?;
    let mut m = BigRational::zero();
    for u in BitString::all(len) {
        let w = problem.weight(x, &u)?.abs();
        if w > m {
            m = w;
        }
    }
    Ok(m)
}
