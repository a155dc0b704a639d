// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact amplitudes in `ℤ[i, 1/√2]`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::pow2;
use crate::quadratic::QSqrt2;

/// `a + b√2` with integer `a`, `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ZSqrt2 {
    pub a: BigInt,
    pub b: BigInt,
}

impl ZSqrt2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        ZSqrt2 { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `(a + b√2)·√2 = 2b + a√2`
    fn times_sqrt2(&self) -> Self {
        ZSqrt2 { a: &self.b * 2, b: self.a.clone() }
    }

    /// `(a + b√2)/√2 = b + (a/2)√2`, for even `a`.
    fn div_sqrt2(&self) -> Self {
        debug_assert!(self.a.is_even());
        ZSqrt2 { a: self.b.clone(), b: &self.a / 2 }
    }

    /// Value divided by `√2^k`, in `ℚ(√2)`.
    pub fn over_sqrt2_pow(&self, k: u32) -> QSqrt2 {
        let (num, e) = if k % 2 == 0 { (self.clone(), k / 2) } else { (self.times_sqrt2(), k.div_ceil(2)) };
        let d = pow2(e);
        QSqrt2::new(
            BigRational::new(num.a, d.clone()),
            BigRational::new(num.b, d),
        )
    }
}

impl<'a> Add<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn add(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl<'a> Sub<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn sub(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl<'a> Mul<&'a ZSqrt2> for &'a ZSqrt2 {
    type Output = ZSqrt2;
    fn mul(self, o: &ZSqrt2) -> ZSqrt2 {
        ZSqrt2 {
            a: &self.a * &o.a + &self.b * &o.b * 2,
            b: &self.a * &o.b + &self.b * &o.a,
        }
    }
}

impl Neg for ZSqrt2 {
    type Output = ZSqrt2;
    fn neg(self) -> ZSqrt2 {
        ZSqrt2 { a: -self.a, b: -self.b }
    }
}

/// `(re + i·im) / √2^k` with `re, im ∈ ℤ[√2]`, kept with minimal `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingAmplitude {
    re: ZSqrt2,
    im: ZSqrt2,
    k: u32,
}

impl RingAmplitude {
    pub fn new(re: ZSqrt2, im: ZSqrt2, k: u32) -> Self {
        let mut z = RingAmplitude { re, im, k };
        z.canonicalize();
        z
    }

    /// `(a + b√2 + (c + d√2) i) / √2^k`
    pub fn from_parts(a: i64, b: i64, c: i64, d: i64, k: u32) -> Self {
        Self::new(ZSqrt2::new(a, b), ZSqrt2::new(c, d), k)
    }

    pub fn zero() -> Self {
        RingAmplitude { re: ZSqrt2::zero(), im: ZSqrt2::zero(), k: 0 }
    }

    pub fn one() -> Self {
        Self::from_parts(1, 0, 0, 0, 0)
    }

    pub fn i() -> Self {
        Self::from_parts(0, 0, 1, 0, 0)
    }

    /// `1/√2`
    pub fn inv_sqrt2() -> Self {
        Self::from_parts(1, 0, 0, 0, 1)
    }

    /// `e^{iπ/4} = (1 + i)/√2`
    pub fn omega() -> Self {
        Self::from_parts(1, 0, 1, 0, 1)
    }

    fn canonicalize(&mut self) {
        if self.re.is_zero() && self.im.is_zero() {
            self.k = 0;
            return;
        }
        while self.k > 0 && self.re.a.is_even() && self.im.a.is_even() {
            self.re = self.re.div_sqrt2();
            self.im = self.im.div_sqrt2();
            self.k -= 1;
        }
    }

    pub fn re(&self) -> &ZSqrt2 {
        &self.re
    }

    pub fn im(&self) -> &ZSqrt2 {
        &self.im
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        RingAmplitude { re: self.re.clone(), im: -self.im.clone(), k: self.k }
    }

    pub fn real_part(&self) -> Self {
        Self::new(self.re.clone(), ZSqrt2::zero(), self.k)
    }

    /// Real part as an element of `ℚ(√2)`.
    pub fn re_value(&self) -> QSqrt2 {
        self.re.over_sqrt2_pow(self.k)
    }

    /// Imaginary part as an element of `ℚ(√2)`.
    pub fn im_value(&self) -> QSqrt2 {
        self.im.over_sqrt2_pow(self.k)
    }

    /// `|z|²`
    pub fn norm_sqr(&self) -> QSqrt2 {
        let n = &(&self.re * &self.re) + &(&self.im * &self.im);
        n.over_sqrt2_pow(2 * self.k)
    }

    fn lift(&self, k: u32) -> (ZSqrt2, ZSqrt2) {
        let (mut re, mut im) = (self.re.clone(), self.im.clone());
        for _ in self.k..k {
            re = re.times_sqrt2();
            im = im.times_sqrt2();
        }
        (re, im)
    }
}

impl<'a> Add<&'a RingAmplitude> for &'a RingAmplitude {
    type Output = RingAmplitude;
    fn add(self, o: &RingAmplitude) -> RingAmplitude {
        let k = self.k.max(o.k);
        let (r1, i1) = self.lift(k);
        let (r2, i2) = o.lift(k);
        RingAmplitude::new(&r1 + &r2, &i1 + &i2, k)
    }
}

impl<'a> Mul<&'a RingAmplitude> for &'a RingAmplitude {
    type Output = RingAmplitude;
    fn mul(self, o: &RingAmplitude) -> RingAmplitude {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        RingAmplitude::new(re, im, self.k + o.k)
    }
}

impl Add for RingAmplitude {
    type Output = RingAmplitude;
    fn add(self, o: RingAmplitude) -> RingAmplitude {
        &self + &o
    }
}

impl Mul for RingAmplitude {
    type Output = RingAmplitude;
    fn mul(self, o: RingAmplitude) -> RingAmplitude {
        &self * &o
    }
}

impl Neg for RingAmplitude {
    type Output = RingAmplitude;
    fn neg(self) -> RingAmplitude {
        RingAmplitude { re: -self.re, im: -self.im, k: self.k }
    }
}

impl Zero for RingAmplitude {
    fn zero() -> Self {
        RingAmplitude::zero()
    }
    fn is_zero(&self) -> bool {
        RingAmplitude::is_zero(self)
    }
}

impl One for RingAmplitude {
    fn one() -> Self {
        RingAmplitude::one()
    }
}

impl fmt::Display for RingAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + ({})i)", self.re_value(), self.im_value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn canonical_form() {
        // 2/√2^2 = 1
        assert_eq!(RingAmplitude::from_parts(2, 0, 0, 0, 2), RingAmplitude::one());
        // √2/√2 = 1
        assert_eq!(RingAmplitude::from_parts(0, 1, 0, 0, 1), RingAmplitude::one());
        let h = RingAmplitude::inv_sqrt2();
        assert_eq!(&h * &h, RingAmplitude::from_parts(1, 0, 0, 0, 2));
        assert_eq!((&h * &h).re_value(), QSqrt2::from(rat(1, 2)));
        assert_eq!(RingAmplitude::from_parts(0, 0, 0, 0, 5).k(), 0);
    }

    #[test]
    fn omega_powers() {
        let w = RingAmplitude::omega();
        let w2 = &w * &w;
        assert_eq!(w2, RingAmplitude::i());
        let w8 = (0..8).fold(RingAmplitude::one(), |acc, _| &acc * &w);
        assert_eq!(w8, RingAmplitude::one());
        assert_eq!(w.norm_sqr(), QSqrt2::one());
        assert_eq!(&w * &w.conj(), RingAmplitude::one());
        assert_eq!(w.re_value(), QSqrt2::new(rat(0, 1), rat(1, 2)));
    }

    #[test]
    fn addition_aligns_scales() {
        let h = RingAmplitude::inv_sqrt2();
        let s = &h + &h; // 2/√2 = √2
        assert_eq!(s, RingAmplitude::from_parts(0, 1, 0, 0, 0));
        assert!((&h + &(-h.clone())).is_zero());
    }
}
