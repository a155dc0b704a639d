// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! The prime-reciprocal weighted counting problem, whose output
//! `Σ_{p ≤ x prime} 1/p` has the primorial of `x` as its denominator, and a
//! certified check of the prime-gap lower bound `π(x) − π(x/e) ≥ x / (3 ln x)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{int, rat, Dyadic};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{RangeTag, RationalOracle, WeightedCountingProblem};
use crate::poly::IntPolynomial;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    // Miller–Rabin with bases that are deterministic below 2^64
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Sieve of Eratosthenes: `sieve[i]` is true iff `i` is prime.
pub fn sieve(limit: usize) -> Vec<bool> {
    let mut s = vec![true; limit + 1];
    s[0] = false;
    if limit >= 1 {
        s[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if s[i] {
            for j in (i * i..=limit).step_by(i) {
                s[j] = false;
            }
        }
        i += 1;
    }
    s
}

pub fn primorial(x: u64) -> BigUint {
    (2..=x).filter(|&p| is_prime(p)).fold(BigUint::one(), |acc, p| acc * p)
}

/// `w(x, u) = 1/(#u + 1)` when `#u + 1` is prime and `#u < #x`, else 0; `p(n) = n`.
pub fn prime_reciprocal_oracle() -> WeightedCountingProblem {
    let oracle = RationalOracle::new(RangeTag::QPoly, |x, u| {
        let n = u.to_u64();
        if is_prime(n + 1) && BigUint::from(n) < x.to_natural() {
            rat(1, n as i64 + 1)
        } else {
            BigRational::zero()
        }
    })
    .with_magnitude_bits(0);
    WeightedCountingProblem::new(IntPolynomial::identity(), oracle)
}

/// Input bitstring for the natural number `n`.
pub fn encode_natural(n: u64) -> BitString {
    BitString::from_natural(&BigUint::from(n))
}

/// Closed interval with dyadic endpoints.
#[derive(Clone, Debug)]
struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    fn round_out(lo: &BigRational, hi: &BigRational, bits: u32) -> Self {
        Enclosure {
            lo: Dyadic::floor_of(lo, bits).to_rational(),
            hi: Dyadic::ceil_of(hi, bits).to_rational(),
        }
    }
}

/// `e` to `bits` fractional bits, from the factorial series with its tail bound.
fn e_enclosure(bits: u32) -> Enclosure {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 2));
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut k = 0i64;
    loop {
        sum += &term;
        k += 1;
        term = term / int(k);
        // remaining tail Σ_{j ≥ k} 1/j! ≤ 2/k!
        if &term * int(2) < eps {
            break;
        }
    }
    let tail = term * int(2);
    Enclosure::round_out(&sum, &(&sum + tail), bits)
}

/// `atanh(z) = Σ z^{2k+1}/(2k+1)` for `0 ≤ z < 1`, with the geometric tail bound.
fn atanh_enclosure(z: &BigRational, bits: u32) -> (BigRational, BigRational) {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let z2 = z * z;
    let one_minus = BigRational::one() - &z2;
    let mut power = z.clone();
    let mut sum = BigRational::zero();
    let mut k = 0i64;
    loop {
        sum += &power / int(2 * k + 1);
        k += 1;
        power = &power * &z2;
        let tail = &power / (int(2 * k + 1) * &one_minus);
        if tail < eps || power.is_zero() {
            return (sum.clone(), sum + tail);
        }
    }
}

/// `ln x` for integer `x ≥ 1`, via `ln x = n ln 2 + ln m` with `m ∈ [1, 2)`.
fn ln_enclosure(x: u64, bits: u32) -> Enclosure {
    let n = 63 - x.leading_zeros();
    let m = rat(x as i64, 1i64 << n);
    let work = bits + 8;
    let (l2_lo, l2_hi) = atanh_enclosure(&rat(1, 3), work);
    let z = (&m - int(1)) / (&m + int(1));
    let (lm_lo, lm_hi) = atanh_enclosure(&z, work);
    let two = int(2);
    let lo = &two * (int(n as i64) * l2_lo + lm_lo);
    let hi = &two * (int(n as i64) * l2_hi + lm_hi);
    Enclosure::round_out(&lo, &hi, bits)
}

/// Prime-counting table `π(0..=limit)`.
fn prime_counts(limit: usize) -> Vec<u64> {
    let s = sieve(limit);
    let mut pi = vec![0u64; limit + 1];
    for i in 1..=limit {
        pi[i] = pi[i - 1] + s[i] as u64;
    }
    pi
}

/// Outcome of one certified comparison at a fixed precision.
enum Verdict {
    Holds,
    Fails,
    Undecided,
}

fn check_point(x: u64, pi: &[u64], bits: u32) -> Verdict {
    let e = e_enclosure(bits);
    let xr = int(x as i64);
    // ⌊x/e⌋ is decisive once both enclosure ends floor to the same integer
    let q_lo = crate::arith::floor(&(&xr / &e.hi));
    let q_hi = crate::arith::floor(&(&xr / &e.lo));
    if q_lo != q_hi {
        return Verdict::Undecided;
    }
    let q: usize = q_lo.try_into().expect("x/e fits in usize");
    let count = int((pi[x as usize] - pi[q]) as i64);
    let ln = ln_enclosure(x, bits);
    let three = int(3);
    let bound_hi = &xr / (&three * &ln.lo);
    let bound_lo = &xr / (&three * &ln.hi);
    if count >= bound_hi {
        Verdict::Holds
    } else if count < bound_lo {
        Verdict::Fails
    } else {
        Verdict::Undecided
    }
}

/// Checks `π(x) − π(x/e) ≥ x / (3 ln x)` for every integer `x ∈ [17, x_max]`.
/// Comparisons start at 64 fractional bits and double until decisive.
pub fn prime_gap_check(x_max: u64) -> Result<bool> {
    if x_max < 17 {
        return Err(Error::Precondition(format!("x_max = {x_max} < 17")));
    }
    let pi = prime_counts(x_max as usize);
    for x in 17..=x_max {
        let mut bits = 64;
        loop {
            match check_point(x, &pi, bits) {
                Verdict::Holds => break,
                Verdict::Fails => return Ok(false),
                Verdict::Undecided => {
                    bits *= 2;
                    if bits > 1 << 14 {
                        return Err(Error::Precondition(format!(
                            "comparison at x = {x} not decisive at {bits} bits"
                        )));
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::exact_sum;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
        let s = sieve(1000);
        for n in 0..=1000u64 {
            assert_eq!(s[n as usize], is_prime(n), "{n}");
        }
    }

    #[test]
    fn reciprocal_sums() {
        let p = prime_reciprocal_oracle();
        assert_eq!(exact_sum(&p, &encode_natural(10)).unwrap(), rat(247, 210));
        assert_eq!(exact_sum(&p, &encode_natural(2)).unwrap(), rat(1, 2));
        assert_eq!(exact_sum(&p, &encode_natural(1)).unwrap(), rat(0, 1));
    }

    #[test]
    fn constants_are_enclosed() {
        let e = e_enclosure(64);
        assert!(e.lo < rat(27183, 10000) && e.hi > rat(27182, 10000));
        assert!(&e.hi - &e.lo <= BigRational::new(BigInt::one(), BigInt::one() << 62));
        let l = ln_enclosure(17, 64);
        // ln 17 = 2.833213344…
        assert!(l.lo < rat(2833214, 1_000_000) && l.hi > rat(2833213, 1_000_000));
        let l1 = ln_enclosure(1, 64);
        assert!(l1.lo <= BigRational::zero() && l1.hi >= BigRational::zero());
    }

    #[test]
    fn gap_examples() {
        assert_eq!(prime_gap_check(17), Ok(true));
        assert_eq!(prime_gap_check(100), Ok(true));
        assert!(matches!(prime_gap_check(16), Err(Error::Precondition(_))));
    }
}
