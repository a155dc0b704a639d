// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact rational helpers and dyadic numbers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn floor(r: &BigRational) -> BigInt {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &BigRational) -> BigInt {
    -(-r.numer()).div_floor(r.denom())
}

/// Nearest integer, ties toward −∞.
pub fn round_nearest(r: &BigRational) -> BigInt {
    ceil(&(r - rat(1, 2)))
}

/// `round_nearest(w · 2^b)`: the canonical `b`-bit two-sided approximation.
pub fn scaled_nearest(w: &BigRational, b: u32) -> BigInt {
    // ⌈(n·2^{b+1} − d) / 2d⌉ without normalizing intermediate fractions
    let d = w.denom();
    let num = (w.numer() << (b as usize + 1)) - d;
    -(-num).div_floor(&(d << 1usize))
}

/// Smallest `a ≥ 0` with `|c| ≤ 2^a`.
pub fn ceil_log2(c: &BigRational) -> u32 {
    let c = c.abs();
    let mut a = 0u32;
    // start from the bit-length guess and adjust
    if c > BigRational::one() {
        let guess = ceil(&c).bits() as u32;
        a = guess.saturating_sub(1);
    }
    while c > int(pow2(a)) {
        a += 1;
    }
    a
}

/// Size of the fraction encoding: bits of |numerator| plus bits of the denominator.
pub fn encoded_bits(r: &BigRational) -> u64 {
    r.numer().bits() + r.denom().bits()
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(1, format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => BigInt::from_str(s).map(int).map_err(|_| bad()),
    }
}

/// `mantissa / 2^exponent`, kept canonical: odd mantissa or exponent 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: u32,
}

impl Dyadic {
    pub fn new(mantissa: BigInt, exponent: u32) -> Self {
        let mut d = Dyadic { mantissa, exponent };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic::new(BigInt::zero(), 0)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0).min(self.exponent as u64) as u32;
        if tz > 0 {
            self.mantissa >>= tz;
            self.exponent -= tz;
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.mantissa.clone(), pow2(self.exponent))
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }

    /// Outward-rounded enclosure bounds of `r` at `bits` fractional bits.
    pub fn floor_of(r: &BigRational, bits: u32) -> Self {
        Dyadic::new(floor(&(r * int(pow2(bits)))), bits)
    }

    pub fn ceil_of(r: &BigRational, bits: u32) -> Self {
        Dyadic::new(ceil(&(r * int(pow2(bits)))), bits)
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.to_rational().cmp(r)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.mantissa, self.exponent)
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(1, format!("invalid dyadic '{s}'"));
        let (m, e) = s.split_once("/2^").ok_or_else(bad)?;
        let m = BigInt::from_str(m.trim()).map_err(|_| bad())?;
        let e = e.trim().parse::<u32>().map_err(|_| bad())?;
        Ok(Dyadic::new(m, e))
    }
}

/// Decimal rendering for display only; the exact value is always printed alongside.
pub fn decimal_display(r: &BigRational, digits: usize) -> String {
    let neg = r.is_negative();
    let r = r.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = round_nearest(&(r * int(scale.clone())));
    let (whole, frac) = scaled.div_rem(&scale);
    let sign = if neg && !(whole.is_zero() && frac.is_zero()) { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{whole}")
    } else {
        format!("{sign}{whole}.{:0>width$}", frac.to_string(), width = digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn scaled_nearest_is_rounded_product(n in -5000i64..5000, d in 1i64..5000, b in 0u32..40) {
            let w = rat(n, d);
            prop_assert_eq!(scaled_nearest(&w, b), round_nearest(&(w * int(pow2(b)))));
        }
    }

    #[test]
    fn rounding_ties_go_down() {
        assert_eq!(round_nearest(&rat(1, 2)), BigInt::from(0));
        assert_eq!(round_nearest(&rat(-1, 2)), BigInt::from(-1));
        assert_eq!(round_nearest(&rat(3, 2)), BigInt::from(1));
        assert_eq!(round_nearest(&rat(5, 3)), BigInt::from(2));
        assert_eq!(round_nearest(&rat(-5, 3)), BigInt::from(-2));
    }

    #[test]
    fn floor_ceil_negative() {
        assert_eq!(floor(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(ceil(&rat(-7, 2)), BigInt::from(-3));
        assert_eq!(ceil(&rat(7, 2)), BigInt::from(4));
    }

    #[test]
    fn dyadic_canonical() {
        let d = Dyadic::new(BigInt::from(84), 6);
        assert_eq!(d.mantissa(), &BigInt::from(21));
        assert_eq!(d.exponent(), 4);
        assert_eq!(d.to_string(), "21/2^4");
        assert_eq!(Dyadic::new(BigInt::from(8), 0).to_string(), "8/2^0");
        assert_eq!(Dyadic::new(BigInt::zero(), 9).exponent(), 0);
        assert_eq!("21/2^4".parse::<Dyadic>().unwrap(), d);
    }

    #[test]
    fn log2_bounds() {
        assert_eq!(ceil_log2(&rat(1, 3)), 0);
        assert_eq!(ceil_log2(&int(1)), 0);
        assert_eq!(ceil_log2(&int(2)), 1);
        assert_eq!(ceil_log2(&rat(5, 2)), 2);
        assert_eq!(ceil_log2(&int(-4)), 2);
        assert_eq!(ceil_log2(&int(5)), 3);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(parse_rational("6/4").unwrap().to_string(), "3/2");
        assert_eq!(parse_rational("-3").unwrap().to_string(), "-3");
        assert!(parse_rational("1/0").is_err());
        assert_eq!(decimal_display(&rat(1, 3), 4), "0.3333");
        assert_eq!(decimal_display(&rat(-3, 2), 2), "-1.50");
    }

    #[test]
    fn encoding_size() {
        assert_eq!(encoded_bits(&rat(1, 3)), 3);
        assert_eq!(encoded_bits(&int(0)), 1);
    }
}
