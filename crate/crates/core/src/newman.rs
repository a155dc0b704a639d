// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Newman's rational approximation of `|x|` and the sign-combination
//! procedures built on it.
//!
//! With nodes `ξ^k`, `ξ = e^{-1/√m}`, `k = 0..m`, and `p(x) = Π_k (x + ξ^k)`,
//! the function `x · (p(x) − p(−x)) / (p(x) + p(−x))` is within
//! `3e^{-√m}` of `|x|` on `[−1, 1]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{int, pow2, rat};
use crate::bits::BitString;
use crate::closure::rational_sign_decide;
use crate::counting::exact_sum;
use crate::error::{Error, Result};
use crate::oracle::{RangeTag, WeightedCountingProblem};
use crate::poly::IntPolynomial;

/// Fractional bits of the rounded nodes.
const NODE_BITS: u32 = 128;

/// `numerator / denominator`, both even functions; coefficients in
/// increasing degree, normalized so that `denominator(0) = 1`.
#[derive(Clone, Debug)]
pub struct RationalFunctionPair {
    numerator: Vec<BigRational>,
    denominator: Vec<BigRational>,
    degree: usize,
    // integer multiples of the coefficients sharing one scale, for fast evaluation
    num_int: Vec<BigInt>,
    den_int: Vec<BigInt>,
}

fn poly_eval_int(coeffs: &[BigInt], a: &BigInt, b: &BigInt, deg: usize) -> BigInt {
    // Σ c_i a^i b^{deg-i}
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    let mut terms = Vec::with_capacity(coeffs.len());
    for _ in 0..coeffs.len() {
        terms.push(bpow.clone());
        bpow *= b;
    }
    let extra = num_traits::pow::pow(b.clone(), deg + 1 - coeffs.len());
    for (i, c) in coeffs.iter().enumerate().rev() {
        acc = acc * a + c * &terms[coeffs.len() - 1 - i];
    }
    acc * extra
}

impl RationalFunctionPair {
    pub fn numerator(&self) -> &[BigRational] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[BigRational] {
        &self.denominator
    }

    /// The node count `m`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let (a, b) = (x.numer(), x.denom());
        let deg = self.num_int.len().max(self.den_int.len());
        let n = poly_eval_int(&self.num_int, a, b, deg);
        let d = poly_eval_int(&self.den_int, a, b, deg);
        BigRational::new(n, d)
    }

    /// Separate values of numerator and denominator at `x`.
    pub fn eval_parts(&self, x: &BigRational) -> (BigRational, BigRational) {
        let (a, b) = (x.numer(), x.denom());
        let deg = self.num_int.len().max(self.den_int.len());
        let scale = num_traits::pow::pow(b.clone(), deg) * &self.den_int[0];
        (
            BigRational::new(poly_eval_int(&self.num_int, a, b, deg), scale.clone()),
            BigRational::new(poly_eval_int(&self.den_int, a, b, deg), scale),
        )
    }
}

/// `e^{-k/s}` rounded down to `NODE_BITS` fractional bits.
fn node(k: u64, s: u64) -> BigInt {
    let guard = NODE_BITS + 64;
    let one = pow2(guard);
    let (mut term, mut sum) = (one.clone(), one.clone());
    let mut j = 1u64;
    while !term.is_zero() {
        term = term * k / (s * j);
        sum += &term;
        j += 1;
    }
    (pow2(NODE_BITS) * one).div_floor(&sum)
}

fn integer_sqrt_exact(m: u64) -> Option<u64> {
    let s = (m as f64).sqrt().round() as u64;
    (s * s == m).then_some(s)
}

/// Newman's approximant with `m` nodes (`m ≥ 4`, a perfect square).
/// Results are cached per `m`.
pub fn newman_rational(m: usize) -> Result<Arc<RationalFunctionPair>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RationalFunctionPair>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache lock").get(&m) {
        return Ok(p.clone());
    }
    let pair = Arc::new(build_newman(m)?);
    cache.lock().expect("cache lock").insert(m, pair.clone());
    Ok(pair)
}

fn build_newman(m: usize) -> Result<RationalFunctionPair> {
    let s = integer_sqrt_exact(m as u64)
        .filter(|_| m >= 4)
        .ok_or_else(|| Error::Precondition(format!("m = {m} must be a perfect square ≥ 4")))?;
    // P(x) = Π (2^B x + n_k) = 2^{Bm} p(x)
    let mut p: Vec<BigInt> = vec![BigInt::one()];
    let lead = pow2(NODE_BITS);
    for k in 0..m as u64 {
        let nk = node(k, s);
        let mut next = vec![BigInt::zero(); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i] += c * &nk;
            next[i + 1] += c * &lead;
        }
        p = next;
    }
    // p(x) - p(-x) keeps odd terms (doubled), p(x) + p(-x) even terms (doubled)
    let mut num_int = vec![BigInt::zero(); p.len() + 1];
    let mut den_int = vec![BigInt::zero(); p.len()];
    for (i, c) in p.iter().enumerate() {
        if i % 2 == 1 {
            num_int[i + 1] = c * 2;
        } else {
            den_int[i] = c * 2;
        }
    }
    while num_int.last().is_some_and(|c| c.is_zero()) {
        num_int.pop();
    }
    while den_int.last().is_some_and(|c| c.is_zero()) {
        den_int.pop();
    }
    let d0 = den_int[0].clone();
    let norm = |cs: &[BigInt]| cs.iter().map(|c| BigRational::new(c.clone(), d0.clone())).collect();
    Ok(RationalFunctionPair {
        numerator: norm(&num_int),
        denominator: norm(&den_int),
        degree: m,
        num_int,
        den_int,
    })
}

/// `c · r(x/c)`, the approximant stretched to `[−c, c]`.
pub fn eval_scaled_abs(
    pair: &RationalFunctionPair,
    c: &BigRational,
    x: &BigRational,
) -> Result<BigRational> {
    if x.abs() > *c {
        return Err(Error::DomainViolation {
            value: x.to_string(),
            c: c.to_string(),
        });
    }
    Ok(c * pair.eval(&(x / c)))
}

/// Rational enclosure `[lo, hi]` of `e^y` for rational `y ≥ 0`.
pub fn exp_enclosure(y: &BigRational) -> (BigRational, BigRational) {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    let mut j = 1u64;
    loop {
        term = term * y / int(j);
        sum += &term;
        j += 1;
        // remaining tail ≤ 2·next term once y/(j) ≤ 1/2
        let next = &term * y / int(j);
        if y * int(2) <= int(j) && next < rat(1, 1 << 40) * &sum {
            return (sum.clone(), sum + next * int(2));
        }
    }
}

/// Enclosure of `3e^{-√m}` for perfect squares `m`.
pub fn newman_bound(m: usize) -> Result<(BigRational, BigRational)> {
    let s = integer_sqrt_exact(m as u64)
        .ok_or_else(|| Error::Precondition(format!("m = {m} must be a perfect square")))?;
    let (lo, hi) = exp_enclosure(&int(s));
    Ok((int(3) / hi, int(3) / lo))
}

#[derive(Clone, Debug)]
pub struct GridReport {
    pub m: usize,
    pub grid: usize,
    pub max_error: BigRational,
    pub argmax: BigRational,
    pub bound_lo: BigRational,
    pub bound_hi: BigRational,
}

impl GridReport {
    /// The measured error is certified to be within the bound.
    pub fn holds(&self) -> bool {
        self.max_error <= self.bound_lo
    }
}

/// Largest `| |x| − r(x) |` over `grid` equispaced points of `[−1, 1]`.
pub fn newman_grid_error(m: usize, grid: usize) -> Result<GridReport> {
    if grid < 2 {
        return Err(Error::Precondition("grid needs at least 2 points".into()));
    }
    use rayon::prelude::*;
    let pair = newman_rational(m)?;
    let steps = (grid - 1) as i64;
    let (max_error, argmax) = (0..grid as i64)
        .into_par_iter()
        .map(|j| {
            let x = BigRational::new(BigInt::from(2 * j - steps), BigInt::from(steps));
            ((x.abs() - pair.eval(&x)).abs(), x)
        })
        .reduce(
            || (BigRational::zero(), BigRational::zero()),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    let (bound_lo, bound_hi) = newman_bound(m)?;
    Ok(GridReport {
        m,
        grid,
        max_error,
        argmax,
        bound_lo,
        bound_hi,
    })
}

/// GapP functions `f_i` with `|f_i(x)| ≤ 2^{p(|x|)}`; `x ∈ L_i` iff `f_i(x) ≥ 0`.
#[derive(Clone, Debug)]
pub struct GapInstance {
    pub problems: Vec<WeightedCountingProblem>,
    pub magnitude_poly: IntPolynomial,
}

/// A boolean function of `k` bits as its `2^k` truth vector. Entry `s` is the
/// value at bits `(b_1, …, b_k)` where `b_1` is the most significant bit of `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTable {
    k: usize,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn new(k: usize, values: Vec<bool>) -> Result<Self> {
        if values.len() != 1 << k {
            return Err(Error::Precondition(format!(
                "truth vector of length {} for {k} bits",
                values.len()
            )));
        }
        Ok(TruthTable { k, values })
    }

    pub fn from_fn(k: usize, f: impl Fn(&[bool]) -> bool) -> Self {
        let values = BitString::all(k).map(|s| f(s.bits())).collect();
        TruthTable { k, values }
    }

    pub fn and(k: usize) -> Self {
        Self::from_fn(k, |b| b.iter().all(|&v| v))
    }

    pub fn or(k: usize) -> Self {
        Self::from_fn(k, |b| b.iter().any(|&v| v))
    }

    pub fn constant(k: usize, v: bool) -> Self {
        Self::from_fn(k, |_| v)
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn eval(&self, bits: &[bool]) -> bool {
        let s = bits.iter().fold(0usize, |s, &b| 2 * s + b as usize);
        self.values[s]
    }
}

struct Prepared {
    f: Vec<BigInt>,
    /// effective magnitude exponent
    p: u32,
    pair: Arc<RationalFunctionPair>,
}

/// `ε` upper bound: `2^p · 3 e^{-2p}`.
fn eps_hi(p: u32) -> BigRational {
    let (lo, _) = exp_enclosure(&int(2 * p));
    int(pow2(p)) * int(3) / lo
}

/// Smallest `p' ≥ max(p, 1)` meeting `accept(ε(p'))`.
fn effective_p(p: u64, accept: impl Fn(&BigRational) -> bool) -> Result<u32> {
    (p.max(1) as u32..=12)
        .find(|&q| accept(&eps_hi(q)))
        .ok_or_else(|| Error::Precondition("magnitude bound too large".into()))
}

fn prepare(inst: &GapInstance, x: &BitString, accept: impl Fn(&BigRational) -> bool) -> Result<Prepared> {
    let k = inst.problems.len();
    if k == 0 || k > 4 {
        return Err(Error::Precondition(format!("{k} problems, expected 1..=4")));
    }
    let p = inst.magnitude_poly.eval(x.len() as u64);
    let mut f = Vec::with_capacity(k);
    for prob in &inst.problems {
        prob.require_tag(RangeTag::T101)?;
        let v = exact_sum(prob, x)?;
        if p > 62 || v.abs() > int(pow2(p as u32)) {
            return Err(Error::InvariantViolation(format!("|f(x)| = {} exceeds 2^{p}", v.abs())));
        }
        f.push(v.to_integer());
    }
    let p = effective_p(p, accept)?;
    let pair = newman_rational(4 * (p as usize) * (p as usize))?;
    Ok(Prepared { f, p, pair })
}

/// Per-function values `(r_i, q_i)` of the scaled approximant at `f_i(x)`,
/// as integers over one shared denominator.
fn flatten_terms(prep: &Prepared) -> (Vec<(BigInt, BigInt)>, BigInt) {
    let c = pow2(prep.p);
    let pair = &prep.pair;
    let deg = pair.num_int.len().max(pair.den_int.len());
    let scale = num_traits::pow::pow(c.clone(), deg) * &pair.den_int[0];
    let terms = prep
        .f
        .iter()
        .map(|fi| {
            let n = poly_eval_int(&pair.num_int, fi, &c, deg);
            let d = poly_eval_int(&pair.den_int, fi, &c, deg);
            (&c * n, d)
        })
        .collect();
    (terms, scale)
}

/// The cleared fraction `r(x) / q(x) = 1 − Σ_i (r_i/q_i − f_i)`, with
/// `q = Π_j q_j`. Also returns the effective magnitude exponent.
pub fn intersect_fraction(inst: &GapInstance, x: &BitString) -> Result<(BigRational, BigRational, u32)> {
    let k = inst.problems.len();
    let prep = prepare(inst, x, |e| e * int(k as u64) < BigRational::one())?;
    let (terms, scale) = flatten_terms(&prep);
    let q: BigInt = terms.iter().map(|(_, qi)| qi.clone()).product();
    let mut r = q.clone();
    for (i, (ri, qi)) in terms.iter().enumerate() {
        let others: BigInt = terms
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (_, qj))| qj.clone())
            .product();
        r -= (ri - &prep.f[i] * qi) * others;
    }
    let s = num_traits::pow::pow(scale, k);
    Ok((BigRational::new(r, s.clone()), BigRational::new(q, s), prep.p))
}

fn checked_sign(num: BigRational, den: BigRational, t: u32) -> Result<bool> {
    let floor = BigRational::new(BigInt::one(), pow2(t));
    if num.abs() < floor || den.abs() < floor {
        return Err(Error::PromiseViolated(format!(
            "assembled fraction {num} / {den} is below the 2^-{t} bound"
        )));
    }
    let t = IntPolynomial::constant(t as u64);
    let sign = rational_sign_decide(
        &WeightedCountingProblem::value(num),
        &WeightedCountingProblem::value(den),
        &t,
        &BitString::new(),
    )?;
    Ok(sign > 0)
}

/// `x ∈ L_1 ∩ … ∩ L_k` by the sign of a single cleared fraction.
pub fn pp_intersect_decide(inst: &GapInstance, x: &BitString) -> Result<bool> {
    let k = inst.problems.len() as u32;
    let (r, q, p) = intersect_fraction(inst, x)?;
    checked_sign(r, q, 2 * k * p)
}

/// `table(b_1, …, b_k)` with `b_i = [f_i(x) ≥ 0]`, by the sign of `P(β) − 1/2`
/// where `P` is the multilinear extension of the table and
/// `β_i = 1 / (1 + 2 (r_i/q_i − f_i)²)` are soft bits: near 1 when
/// `f_i(x) ≥ 0`, at most about 1/9 otherwise.
pub fn pp_truthtable_decide(inst: &GapInstance, table: &TruthTable, x: &BitString) -> Result<bool> {
    let k = inst.problems.len();
    if table.arity() != k {
        return Err(Error::Precondition(format!(
            "table has arity {}, instance has {k} functions",
            table.arity()
        )));
    }
    // every soft bit within δ of its hard bit keeps P(β) on the right side of 1/2
    let slack_ok = |e: &BigRational| {
        if *e >= int(2) {
            return false;
        }
        let two = int(2);
        let member = &two * e * e;
        let gap = &two - e;
        let non_member = BigRational::one() / (BigRational::one() + &two * &gap * &gap);
        let delta = member.max(non_member);
        num_traits::pow::pow(BigRational::one() - delta, k) * &two > BigRational::one()
    };
    let prep = prepare(inst, x, slack_ok)?;
    let (terms, scale) = flatten_terms(&prep);
    // β_i = A_i / B_i, both over scale²
    let ab: Vec<(BigInt, BigInt)> = terms
        .iter()
        .zip(&prep.f)
        .map(|((ri, qi), fi)| {
            let a = qi * qi;
            let d = ri - fi * qi;
            let b = &a + &d * &d * 2;
            (a, b)
        })
        .collect();
    let den: BigInt = ab.iter().map(|(_, b)| b.clone()).product();
    let mut num = BigInt::zero();
    for s in BitString::all(k) {
        if table.eval(s.bits()) {
            num += s
                .bits()
                .iter()
                .zip(&ab)
                .map(|(&bit, (a, b))| if bit { a.clone() } else { b - a })
                .product::<BigInt>();
        }
    }
    let num = num * 2 - &den;
    let s = num_traits::pow::pow(scale, 2 * k);
    checked_sign(
        BigRational::new(num, s.clone()),
        BigRational::new(den * 2, s),
        2 * k as u32 * prep.p,
    )
}

/// Reference answer: the table applied to the exact sign tests.
pub fn brute_force_truthtable(inst: &GapInstance, table: &TruthTable, x: &BitString) -> Result<bool> {
    let bits = inst
        .problems
        .iter()
        .map(|p| Ok(!exact_sum(p, x)?.is_negative()))
        .collect::<Result<Vec<bool>>>()?;
    Ok(table.eval(&bits))
}

/// A T101 problem with value `v` (`|v| ≤ 2^path_len`).
pub fn gap_value(v: i64, path_len: u32) -> Result<WeightedCountingProblem> {
    let n = 1i64 << path_len;
    if v.abs() > n {
        return Err(Error::Precondition(format!("|{v}| exceeds 2^{path_len}")));
    }
    Ok(WeightedCountingProblem::from_fn(
        IntPolynomial::constant(path_len as u64),
        RangeTag::T101,
        move |_, u| {
            let i = u.to_u64() as i64;
            if i < v.abs() {
                int(v.signum())
            } else {
                BigRational::zero()
            }
        },
    ))
}
