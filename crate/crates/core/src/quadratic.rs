// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact real numbers of the form `α + β√2` with rational `α`, `β`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{self, int, pow2};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub rational: BigRational,
    pub sqrt2: BigRational,
}

impl QSqrt2 {
    pub fn new(rational: BigRational, sqrt2: BigRational) -> Self {
        QSqrt2 { rational, sqrt2 }
    }

    pub fn zero() -> Self {
        QSqrt2::default()
    }

    pub fn one() -> Self {
        QSqrt2::from(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.sqrt2.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.sqrt2.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.rational)
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.rational);
        let sb = sign_of(&self.sqrt2);
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // opposite signs: compare α² with 2β²
        let a2 = &self.rational * &self.rational;
        let b2 = &self.sqrt2 * &self.sqrt2 * int(2);
        match a2.cmp(&b2) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// `⌊self⌋`.
    pub fn floor(&self) -> BigInt {
        // |β|√2 rounded down via isqrt, then corrected with exact sign tests
        let beta2 = &self.sqrt2 * &self.sqrt2 * int(2);
        let root = arith::floor(&beta2).sqrt();
        let irr = if self.sqrt2.is_negative() { -root } else { root };
        let mut n = arith::floor(&self.rational) + irr;
        while (self - &QSqrt2::from(int(n.clone()))).signum() < 0 {
            n -= 1;
        }
        while (self - &QSqrt2::from(int(&n + 1))).signum() >= 0 {
            n += 1;
        }
        n
    }

    /// `⌊self · 2^b⌋`.
    pub fn floor_scaled(&self, b: u32) -> BigInt {
        self.scale(&int(pow2(b))).floor()
    }

    /// Nearest integer to `self · 2^b`, ties toward −∞.
    pub fn nearest_scaled(&self, b: u32) -> BigInt {
        let y = self.scale(&int(pow2(b)));
        // ceil(y − 1/2) = −floor(1/2 − y)
        -(QSqrt2::from(arith::rat(1, 2)) - y).floor()
    }

    pub fn scale(&self, c: &BigRational) -> QSqrt2 {
        QSqrt2::new(&self.rational * c, &self.sqrt2 * c)
    }

    pub fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.sqrt2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl From<BigRational> for QSqrt2 {
    fn from(r: BigRational) -> Self {
        QSqrt2::new(r, BigRational::zero())
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.rational + &o.rational, &self.sqrt2 + &o.sqrt2)
    }
}

impl<'a> Sub<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(&self.rational - &o.rational, &self.sqrt2 - &o.sqrt2)
    }
}

impl<'a> Mul<&'a QSqrt2> for &'a QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: &QSqrt2) -> QSqrt2 {
        QSqrt2::new(
            &self.rational * &o.rational + &self.sqrt2 * &o.sqrt2 * int(2),
            &self.rational * &o.sqrt2 + &self.sqrt2 * &o.rational,
        )
    }
}

impl Add for QSqrt2 {
    type Output = QSqrt2;
    fn add(self, o: QSqrt2) -> QSqrt2 {
        &self + &o
    }
}

impl Sub for QSqrt2 {
    type Output = QSqrt2;
    fn sub(self, o: QSqrt2) -> QSqrt2 {
        &self - &o
    }
}

impl Mul for QSqrt2 {
    type Output = QSqrt2;
    fn mul(self, o: QSqrt2) -> QSqrt2 {
        &self * &o
    }
}

impl Neg for QSqrt2 {
    type Output = QSqrt2;
    fn neg(self) -> QSqrt2 {
        QSqrt2::new(-self.rational, -self.sqrt2)
    }
}

impl std::iter::Sum for QSqrt2 {
    fn sum<I: Iterator<Item = QSqrt2>>(iter: I) -> QSqrt2 {
        iter.fold(QSqrt2::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for QSqrt2 {
    /// `a/b` for rationals, otherwise `a/b + c/d*sqrt2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sqrt2.is_zero() {
            return write!(f, "{}", self.rational);
        }
        if self.rational.is_zero() {
            return write!(f, "{}*sqrt2", self.sqrt2);
        }
        if self.sqrt2.is_negative() {
            write!(f, "{} - {}*sqrt2", self.rational, -&self.sqrt2)
        } else {
            write!(f, "{} + {}*sqrt2", self.rational, self.sqrt2)
        }
    }
}
