// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Closure properties of weighted counting functions.
//!
//! Each builder returns a new [`WeightedCountingProblem`] whose approximation
//! map is rederived from the children's, so the `2^{-b}` contract survives
//! composition. [`ClosureExpr`] strings the builders together and can also
//! evaluate a tree by direct arithmetic on the children's exact sums.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{ceil_log2, int, pow2, round_nearest};
use crate::bits::{bit_length, BitString};
use crate::counting::{approx_sum, exact_sum};
use crate::error::{Error, Result};
use crate::oracle::{RangeTag, WeightOracle, WeightedCountingProblem};
use crate::poly::IntPolynomial;

type ExactMap = Box<dyn Fn(&BitString, &BitString) -> Result<BigRational> + Send + Sync>;
type ApproxMap = Box<dyn Fn(&BitString, &BitString, u32) -> Result<BigInt> + Send + Sync>;
type MagnitudeMap = Box<dyn Fn(&BitString) -> Option<u32> + Send + Sync>;

struct Derived {
    tag: RangeTag,
    has_exact: bool,
    exact: ExactMap,
    approx: ApproxMap,
    magnitude: MagnitudeMap,
}

impl WeightOracle for Derived {
    fn range_tag(&self) -> RangeTag {
        self.tag
    }
    fn approx(&self, x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        (self.approx)(x, u, b)
    }
    fn has_exact(&self) -> bool {
        self.has_exact
    }
    fn exact(&self, x: &BitString, u: &BitString) -> Result<BigRational> {
        if !self.has_exact {
            return Err(Error::ExactUnavailable);
        }
        (self.exact)(x, u)
    }
    fn magnitude_bits(&self, x: &BitString) -> Option<u32> {
        (self.magnitude)(x)
    }
}

/// Derived problems are tagged REAL if any child is, QPOLY otherwise.
fn derived_tag(children: &[&WeightedCountingProblem]) -> RangeTag {
    if children.iter().any(|c| c.tag() == RangeTag::Real || !c.oracle().has_exact()) {
        RangeTag::Real
    } else {
        RangeTag::QPoly
    }
}

fn all_exact(children: &[&WeightedCountingProblem]) -> bool {
    children.iter().all(|c| c.oracle().has_exact())
}

fn build(
    path_poly: IntPolynomial,
    children: &[&WeightedCountingProblem],
    exact: impl Fn(&BitString, &BitString) -> Result<BigRational> + Send + Sync + 'static,
    approx: impl Fn(&BitString, &BitString, u32) -> Result<BigInt> + Send + Sync + 'static,
    magnitude: impl Fn(&BitString) -> Option<u32> + Send + Sync + 'static,
) -> WeightedCountingProblem {
    let cap = children.iter().map(|c| c.cap_log2()).max().unwrap_or(crate::oracle::DEFAULT_CAP_LOG2);
    let oracle = Derived {
        tag: derived_tag(children),
        has_exact: all_exact(children),
        exact: Box::new(exact),
        approx: Box::new(approx),
        magnitude: Box::new(magnitude),
    };
    WeightedCountingProblem::new(path_poly, oracle).with_cap(cap)
}

/// Rounds `value / 2^from` to the nearest multiple of `2^{-to}`, as an integer over `2^to`.
fn rescale(value: BigInt, from: u32, to: u32) -> BigInt {
    debug_assert!(from >= to);
    round_nearest(&BigRational::new(value, pow2(from - to)))
}

/// One factor of a product weight: oracle, input, path.
type Factor = (Arc<dyn WeightOracle>, BitString, BitString);

fn product_exact(factors: &[Factor]) -> Result<BigRational> {
    let mut acc = BigRational::one();
    for (o, x, u) in factors {
        let w = o.exact(x, u)?;
        if w.is_zero() {
            return Ok(w);
        }
        acc *= w;
    }
    Ok(acc)
}

/// `b`-bit approximation of a product of `k` weights with `|w_i| ≤ 2^{a_i}`.
///
/// Factor `i` is taken at precision `B_i = b + 1 + ⌈log₂ k⌉ + Σ_{j≠i}(a_j + 1)`.
/// Every approximation satisfies `|y_j| ≤ 2^{a_j+1}`, so the telescoping
/// error of the product is at most `k · 2^{-(b+1+⌈log₂ k⌉)} ≤ 2^{-(b+1)}`,
/// and the final rounding adds at most another `2^{-(b+1)}`.
fn product_approx(factors: &[Factor], b: u32) -> Result<BigInt> {
    match factors {
        [] => return Ok(pow2(b)),
        [(o, x, u)] => return o.approx(x, u, b),
        _ => {}
    }
    let mags = factors
        .iter()
        .map(|(o, x, _)| o.magnitude_bits(x).ok_or(Error::MissingMagnitudeBound))
        .collect::<Result<Vec<u32>>>()?;
    let lk = bit_length(factors.len() as u64 - 1);
    let total: u32 = mags.iter().map(|a| a + 1).sum();
    let mut prod = BigInt::one();
    let mut prec = 0u32;
    for ((o, x, u), a) in factors.iter().zip(&mags) {
        let bi = b + 1 + lk + total - (a + 1);
        let v = o.approx(x, u, bi)?;
        if v.is_zero() {
            return Ok(BigInt::zero());
        }
        prod *= v;
        prec += bi;
    }
    Ok(rescale(prod, prec, b))
}

fn sum_bits(mags: impl IntoIterator<Item = Option<u32>>) -> Option<u32> {
    mags.into_iter().try_fold(0u32, |acc, a| a.map(|a| acc + a))
}

/// `f(x) + c`: the constant rides on the all-zero path.
pub fn add_const(f: &WeightedCountingProblem, c: &BigRational) -> WeightedCountingProblem {
    let (fe, fa, fm) = (f.clone(), f.clone(), f.clone());
    let (ce, ca, cm) = (c.clone(), c.clone(), c.clone());
    build(
        f.path_poly().clone(),
        &[f],
        move |x, u| {
            let w = fe.weight(x, u)?;
            Ok(if u.is_all_zero() { w + &ce } else { w })
        },
        move |x, u, b| {
            if !u.is_all_zero() {
                return fa.approx_weight(x, u, b);
            }
            let total = BigRational::new(fa.approx_weight(x, u, b + 1)?, pow2(b + 1)) + &ca;
            Ok(round_nearest(&(total * int(pow2(b)))))
        },
        move |x| {
            let a = fm.oracle().magnitude_bits(x)?;
            Some(a.max(ceil_log2(&cm)) + 1)
        },
    )
}

/// `c · f(x)`. Internally the child is read at `b + a + 1` bits with
/// `a = ⌈log₂ max(|c|, 1)⌉`.
pub fn scale(f: &WeightedCountingProblem, c: &BigRational) -> WeightedCountingProblem {
    let (fe, fa, fm) = (f.clone(), f.clone(), f.clone());
    let (ce, ca) = (c.clone(), c.clone());
    let a = ceil_log2(c);
    let zero = c.is_zero();
    build(
        f.path_poly().clone(),
        &[f],
        move |x, u| {
            if ce.is_zero() {
                return Ok(BigRational::zero());
            }
            Ok(fe.weight(x, u)? * &ce)
        },
        move |x, u, b| {
            if ca.is_zero() {
                return Ok(BigInt::zero());
            }
            let v = fa.approx_weight(x, u, b + a + 1)?;
            Ok(round_nearest(&(BigRational::from_integer(v) * &ca / int(pow2(a + 1)))))
        },
        move |x| if zero { Some(0) } else { Some(fm.oracle().magnitude_bits(x)? + a) },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CombineKind {
    Sum,
    Product,
}

/// `Σ_i f_i(x)` or `Π_i f_i(x)` for `1 ≤ k ≤ 8` children.
///
/// Sum: a selector of `⌈log₂ k⌉` bits picks the child; selector values `≥ k`
/// and path bits beyond the chosen child's length carry weight 0.
/// Product: the path is the concatenation of the children's paths.
pub fn finite_combine(
    kind: CombineKind,
    fs: &[WeightedCountingProblem],
) -> Result<WeightedCountingProblem> {
    if fs.is_empty() {
        return Err(Error::EmptyList);
    }
    if fs.len() > 8 {
        return Err(Error::Precondition(format!("{} children, at most 8 supported", fs.len())));
    }
    let refs: Vec<&WeightedCountingProblem> = fs.iter().collect();
    let children: Arc<Vec<WeightedCountingProblem>> = Arc::new(fs.to_vec());
    match kind {
        CombineKind::Sum => {
            let s = bit_length(fs.len() as u64 - 1) as usize;
            let max = fs
                .iter()
                .fold(IntPolynomial::zero(), |m, f| m.max(f.path_poly()));
            let path_poly = max.add(&IntPolynomial::constant(s as u64));
            // Some(child, child path) when the path selects a live child.
            let select = {
                let children = children.clone();
                move |x: &BitString, u: &BitString| -> Option<(usize, BitString)> {
                    let (sel, rest) = u.split_at(s);
                    let i = sel.to_u64() as usize;
                    let f = children.get(i)?;
                    let (own, pad) = rest.split_at(f.path_len(x) as usize);
                    pad.is_all_zero().then_some((i, own))
                }
            };
            let (se, sa) = (select.clone(), select);
            let (ce, ca, cm) = (children.clone(), children.clone(), children);
            Ok(build(
                path_poly,
                &refs,
                move |x, u| match se(x, u) {
                    Some((i, own)) => ce[i].weight(x, &own),
                    None => Ok(BigRational::zero()),
                },
                move |x, u, b| match sa(x, u) {
                    Some((i, own)) => ca[i].approx_weight(x, &own, b),
                    None => Ok(BigInt::zero()),
                },
                move |x| cm.iter().map(|f| f.oracle().magnitude_bits(x)).try_fold(0, |m, a| a.map(|a| m.max(a))),
            ))
        }
        CombineKind::Product => {
            let path_poly = fs
                .iter()
                .fold(IntPolynomial::zero(), |s, f| s.add(f.path_poly()));
            let factors = {
                let children = children.clone();
                move |x: &BitString, u: &BitString| -> Vec<Factor> {
                    let mut at = 0;
                    children
                        .iter()
                        .map(|f| {
                            let len = f.path_len(x) as usize;
                            let part = u.slice(at, at + len);
                            at += len;
                            (f.oracle().clone(), x.clone(), part)
                        })
                        .collect()
                }
            };
            let (fe, fa) = (factors.clone(), factors);
            Ok(build(
                path_poly,
                &refs,
                move |x, u| product_exact(&fe(x, u)),
                move |x, u, b| product_approx(&fa(x, u), b),
                move |x| sum_bits(children.iter().map(|f| f.oracle().magnitude_bits(x))),
            ))
        }
    }
}

/// `g(x) = Σ_{y ∈ {0,1}^{p(|x|)}} f(x ++ y)`. The path is `y` followed by
/// `f`'s path on `x ++ y`.
pub fn uniform_exp_sum(f: &WeightedCountingProblem, p: &IntPolynomial) -> WeightedCountingProblem {
    let shifted = IntPolynomial::identity().add(p);
    let path_poly = p.add(&f.path_poly().compose(&shifted));
    let (fe, fa, fm) = (f.clone(), f.clone(), f.clone());
    let (pe, pa, pm) = (p.clone(), p.clone(), p.clone());
    let split = |p: &IntPolynomial, x: &BitString, u: &BitString| {
        let (y, rest) = u.split_at(p.eval(x.len() as u64) as usize);
        (x.concat(&y), rest)
    };
    build(
        path_poly,
        &[f],
        move |x, u| {
            let (xy, rest) = split(&pe, x, u);
            fe.weight(&xy, &rest)
        },
        move |x, u, b| {
            let (xy, rest) = split(&pa, x, u);
            fa.approx_weight(&xy, &rest, b)
        },
        move |x| {
            let y = BitString::zeros(pm.eval(x.len() as u64) as usize);
            fm.oracle().magnitude_bits(&x.concat(&y))
        },
    )
}

/// `g(x) = Π_{y=1}^{p(|x|)} f(x ++ y)` with `y` in `bitlen(p(|x|))` bits.
///
/// The path holds one segment of width `p_f(|x| + p(|x|))` per factor; bits
/// a segment does not use must be zero.
pub fn uniform_poly_product(
    f: &WeightedCountingProblem,
    p: &IntPolynomial,
) -> WeightedCountingProblem {
    let shifted = IntPolynomial::identity().add(p);
    let width = f.path_poly().compose(&shifted);
    let path_poly = p.mul(&width);
    let (f0, p0, w0) = (f.clone(), p.clone(), width);
    let factors = move |x: &BitString, u: &BitString| -> Option<Vec<Factor>> {
        let n = x.len() as u64;
        let count = p0.eval(n);
        let ybits = bit_length(count) as usize;
        let seg = w0.eval(n) as usize;
        let mut out = Vec::with_capacity(count as usize);
        for y in 1..=count {
            let xy = x.concat(&BitString::from_u64(y, ybits));
            let len = f0.path_len(&xy) as usize;
            let start = (y as usize - 1) * seg;
            let (own, pad) = (u.slice(start, start + len), u.slice(start + len, start + seg));
            if !pad.is_all_zero() {
                return None;
            }
            out.push((f0.oracle().clone(), xy, own));
        }
        Some(out)
    };
    let factors = Arc::new(factors);
    let (fe, fa) = (factors.clone(), factors);
    let (fm, pm) = (f.clone(), p.clone());
    build(
        path_poly,
        &[f],
        move |x, u| match fe(x, u) {
            Some(fs) => product_exact(&fs),
            None => Ok(BigRational::zero()),
        },
        move |x, u, b| match fa(x, u) {
            Some(fs) => product_approx(&fs, b),
            None => Ok(BigInt::zero()),
        },
        move |x| {
            let count = pm.eval(x.len() as u64);
            let xy = x.concat(&BitString::zeros(bit_length(count) as usize));
            Some(fm.oracle().magnitude_bits(&xy)? * count as u32)
        },
    )
}

/// `Σ_{e ∈ {0..r(n)}^{q(n)}} c(x ++ e) · Π_{i=1}^{q(n)} f(x ++ i)^{e_i}`.
///
/// Path layout: `q·r` bits for the exponent blocks (each `bitlen(r(n))` bits
/// wide, the remainder zero), then `c`'s path, then `q·r` segments for the
/// factors of `f`. Segment `(i, j)` is live when `j < e_i`; dead segments,
/// padding and out-of-range exponents force weight 0.
pub fn multivariate_poly(
    c: &WeightedCountingProblem,
    f: &WeightedCountingProblem,
    q: &IntPolynomial,
    r: &IntPolynomial,
) -> WeightedCountingProblem {
    let qr = q.mul(r);
    let c_width = c.path_poly().compose(&IntPolynomial::identity().add(&qr));
    let f_width = f.path_poly().compose(&IntPolynomial::identity().add(q));
    let path_poly = qr.add(&c_width).add(&qr.mul(&f_width));
    let (c0, f0, q0, r0) = (c.clone(), f.clone(), q.clone(), r.clone());
    let factors = move |x: &BitString, u: &BitString| -> Option<Vec<Factor>> {
        let n = x.len() as u64;
        let (qn, rn) = (q0.eval(n), r0.eval(n));
        let (rb, ib) = (bit_length(rn) as usize, bit_length(qn) as usize);
        let e_region = (qn * rn) as usize;
        let used = qn as usize * rb;
        if !u.slice(used, e_region).is_all_zero() {
            return None;
        }
        let mut exps = Vec::with_capacity(qn as usize);
        for i in 0..qn as usize {
            let e = u.slice(i * rb, (i + 1) * rb).to_u64();
            if e > rn {
                return None;
            }
            exps.push(e as usize);
        }
        let xe = x.concat(&u.slice(0, used));
        let c_start = e_region;
        let c_seg = c0.path_poly().eval(n + qn * rn) as usize;
        let c_len = c0.path_len(&xe) as usize;
        if !u.slice(c_start + c_len, c_start + c_seg).is_all_zero() {
            return None;
        }
        let mut out = vec![(c0.oracle().clone(), xe, u.slice(c_start, c_start + c_len))];
        let f_start = c_start + c_seg;
        let f_seg = f0.path_poly().eval(n + qn) as usize;
        for (i, &e) in exps.iter().enumerate() {
            let xi = x.concat(&BitString::from_u64(i as u64 + 1, ib));
            let len = f0.path_len(&xi) as usize;
            for j in 0..rn as usize {
                let start = f_start + (i * rn as usize + j) * f_seg;
                if j < e {
                    if !u.slice(start + len, start + f_seg).is_all_zero() {
                        return None;
                    }
                    out.push((f0.oracle().clone(), xi.clone(), u.slice(start, start + len)));
                } else if !u.slice(start, start + f_seg).is_all_zero() {
                    return None;
                }
            }
        }
        Some(out)
    };
    let factors = Arc::new(factors);
    let (fe, fa) = (factors.clone(), factors);
    let (cm, fm, qm, rm) = (c.clone(), f.clone(), q.clone(), r.clone());
    build(
        path_poly,
        &[c, f],
        move |x, u| match fe(x, u) {
            Some(fs) => product_exact(&fs),
            None => Ok(BigRational::zero()),
        },
        move |x, u, b| match fa(x, u) {
            Some(fs) => product_approx(&fs, b),
            None => Ok(BigInt::zero()),
        },
        move |x| {
            let n = x.len() as u64;
            let (qn, rn) = (qm.eval(n), rm.eval(n));
            let xe = x.concat(&BitString::zeros(qn as usize * bit_length(rn) as usize));
            let xi = x.concat(&BitString::zeros(bit_length(qn) as usize));
            let ac = cm.oracle().magnitude_bits(&xe)?;
            let af = fm.oracle().magnitude_bits(&xi)?;
            Some(ac + af * (qn * rn) as u32)
        },
    )
}

/// Sign of `num(x) / den(x)`, given the promise `|num(x)|, |den(x)| ≥ 2^{-t(|x|)}`.
///
/// Both are approximated to within `2^{-t-1}`; an approximation that close
/// to zero means the promise does not hold.
pub fn rational_sign_decide(
    num: &WeightedCountingProblem,
    den: &WeightedCountingProblem,
    t: &IntPolynomial,
    x: &BitString,
) -> Result<i32> {
    let b = u32::try_from(t.eval(x.len() as u64) + 1)
        .map_err(|_| Error::Precondition("precision too large".into()))?;
    let floor = BigRational::new(BigInt::one(), pow2(b));
    let mut sign = 1;
    for (name, p) in [("numerator", num), ("denominator", den)] {
        let v = approx_sum(p, x, b)?.to_rational();
        if v.abs() < floor {
            return Err(Error::PromiseViolated(format!(
                "{name} approximation {v} is within {floor} of zero"
            )));
        }
        if v.is_negative() {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// A tree of closure operations over leaf problems.
#[derive(Clone, Debug)]
pub enum ClosureExpr {
    Leaf(WeightedCountingProblem),
    AddConst(Box<ClosureExpr>, BigRational),
    Scale(Box<ClosureExpr>, BigRational),
    FiniteSum(Vec<ClosureExpr>),
    FiniteProduct(Vec<ClosureExpr>),
    UniformExpSum(Box<ClosureExpr>, IntPolynomial),
    UniformPolyProduct(Box<ClosureExpr>, IntPolynomial),
    MultivariatePoly {
        c: Box<ClosureExpr>,
        f: Box<ClosureExpr>,
        q: IntPolynomial,
        r: IntPolynomial,
    },
}

impl ClosureExpr {
    pub fn leaf(p: WeightedCountingProblem) -> Self {
        ClosureExpr::Leaf(p)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ClosureExpr::Leaf(_) => "Leaf",
            ClosureExpr::AddConst(..) => "AddConst",
            ClosureExpr::Scale(..) => "Scale",
            ClosureExpr::FiniteSum(_) => "FiniteSum",
            ClosureExpr::FiniteProduct(_) => "FiniteProduct",
            ClosureExpr::UniformExpSum(..) => "UniformExpSum",
            ClosureExpr::UniformPolyProduct(..) => "UniformPolyProduct",
            ClosureExpr::MultivariatePoly { .. } => "MultivariatePoly",
        }
    }

    /// The weighted counting problem computing this expression.
    pub fn build(&self) -> Result<WeightedCountingProblem> {
        Ok(match self {
            ClosureExpr::Leaf(p) => p.clone(),
            ClosureExpr::AddConst(e, c) => add_const(&e.build()?, c),
            ClosureExpr::Scale(e, c) => scale(&e.build()?, c),
            ClosureExpr::FiniteSum(es) => finite_combine(CombineKind::Sum, &Self::build_all(es)?)?,
            ClosureExpr::FiniteProduct(es) => {
                finite_combine(CombineKind::Product, &Self::build_all(es)?)?
            }
            ClosureExpr::UniformExpSum(e, p) => uniform_exp_sum(&e.build()?, p),
            ClosureExpr::UniformPolyProduct(e, p) => uniform_poly_product(&e.build()?, p),
            ClosureExpr::MultivariatePoly { c, f, q, r } => {
                multivariate_poly(&c.build()?, &f.build()?, q, r)
            }
        })
    }

    fn build_all(es: &[ClosureExpr]) -> Result<Vec<WeightedCountingProblem>> {
        es.iter().map(|e| e.build()).collect()
    }

    /// The value at `x` by direct arithmetic on the leaves' exact sums,
    /// without going through the combined path space.
    pub fn evaluate(&self, x: &BitString) -> Result<BigRational> {
        let n = x.len() as u64;
        match self {
            ClosureExpr::Leaf(p) => exact_sum(p, x),
            ClosureExpr::AddConst(e, c) => Ok(e.evaluate(x)? + c),
            ClosureExpr::Scale(e, c) => Ok(e.evaluate(x)? * c),
            ClosureExpr::FiniteSum(es) => {
                if es.is_empty() {
                    return Err(Error::EmptyList);
                }
                es.iter().try_fold(BigRational::zero(), |s, e| Ok(s + e.evaluate(x)?))
            }
            ClosureExpr::FiniteProduct(es) => {
                if es.is_empty() {
                    return Err(Error::EmptyList);
                }
                es.iter().try_fold(BigRational::one(), |s, e| Ok(s * e.evaluate(x)?))
            }
            ClosureExpr::UniformExpSum(e, p) => BitString::all(p.eval(n) as usize)
                .try_fold(BigRational::zero(), |s, y| Ok(s + e.evaluate(&x.concat(&y))?)),
            ClosureExpr::UniformPolyProduct(e, p) => {
                let count = p.eval(n);
                let bits = bit_length(count) as usize;
                (1..=count).try_fold(BigRational::one(), |s, y| {
                    Ok(s * e.evaluate(&x.concat(&BitString::from_u64(y, bits)))?)
                })
            }
            ClosureExpr::MultivariatePoly { c, f, q, r } => {
                let (qn, rn) = (q.eval(n) as usize, r.eval(n));
                let (rb, ib) = (bit_length(rn) as usize, bit_length(qn as u64) as usize);
                let fv = (1..=qn)
                    .map(|i| f.evaluate(&x.concat(&BitString::from_u64(i as u64, ib))))
                    .collect::<Result<Vec<_>>>()?;
                let mut total = BigRational::zero();
                let mut exps = vec![0u64; qn];
                loop {
                    let enc = exps
                        .iter()
                        .fold(BitString::new(), |s, &e| s.concat(&BitString::from_u64(e, rb)));
                    let mut term = c.evaluate(&x.concat(&enc))?;
                    for (v, &e) in fv.iter().zip(&exps) {
                        term *= num_traits::pow::pow(v.clone(), e as usize);
                    }
                    total += term;
                    // next exponent tuple in {0..rn}^qn
                    let mut i = 0;
                    while i < qn && exps[i] == rn {
                        exps[i] = 0;
                        i += 1;
                    }
                    if i == qn {
                        break;
                    }
                    exps[i] += 1;
                }
                Ok(total)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::counting::approx_sum;
    use proptest::prelude::*;

    fn x() -> BitString {
        BitString::new()
    }

    fn constant(p: u64, c: BigRational) -> WeightedCountingProblem {
        WeightedCountingProblem::constant(IntPolynomial::constant(p), c)
    }

    /// `f` with value `v` spread over `2^p` paths.
    fn valued(v: BigRational, p: u64) -> WeightedCountingProblem {
        constant(p, v / int(pow2(p as u32)))
    }

    /// `f(z) = #z`, path length 0.
    fn count_of_input() -> WeightedCountingProblem {
        WeightedCountingProblem::from_fn(IntPolynomial::zero(), RangeTag::Nat, |z, _| {
            int(z.to_u64())
        })
        .with_magnitude_bits(16)
    }

    fn value(p: &WeightedCountingProblem) -> BigRational {
        exact_sum(p, &x()).unwrap()
    }

    fn assert_approximable(p: &WeightedCountingProblem, x: &BitString) {
        let f = exact_sum(p, x).unwrap();
        for b in [0u32, 1, 3, 8, 17, 24] {
            let a = approx_sum(p, x, b).unwrap().to_rational();
            assert!((a - &f).abs() <= BigRational::new(1.into(), pow2(b)), "b={b}");
        }
    }

    #[test]
    fn add_const_examples() {
        assert_eq!(value(&add_const(&valued(rat(2, 1), 1), &rat(3, 1))), rat(5, 1));
        assert!(value(&add_const(&WeightedCountingProblem::zero(IntPolynomial::zero()), &rat(0, 1))).is_zero());
        let third = valued(rat(4, 3), 2);
        let p = add_const(&third, &rat(-1, 3));
        assert_eq!(value(&p), rat(1, 1));
        assert_approximable(&p, &x());
    }

    #[test]
    fn scale_examples() {
        assert_eq!(value(&scale(&valued(rat(6, 1), 1), &rat(-1, 1))), rat(-6, 1));
        let p = scale(&valued(rat(4, 3), 2), &rat(3, 1));
        assert_eq!(value(&p), rat(4, 1));
        assert_approximable(&p, &x());
        let z = scale(&valued(rat(4, 3), 2), &rat(0, 1));
        assert!(value(&z).is_zero());
        assert_approximable(&z, &x());
    }

    #[test]
    fn combine_examples() {
        let (f, g) = (valued(rat(2, 1), 1), valued(rat(3, 1), 2));
        let s = finite_combine(CombineKind::Sum, &[f.clone(), g.clone()]).unwrap();
        assert_eq!(value(&s), rat(5, 1));
        assert_eq!(s.path_len(&x()), 3);
        let p = finite_combine(CombineKind::Product, &[f, g]).unwrap();
        assert_eq!(value(&p), rat(6, 1));
        let p = finite_combine(
            CombineKind::Product,
            &[valued(rat(4, 3), 1), valued(rat(3, 4), 2)],
        )
        .unwrap();
        assert_eq!(value(&p), rat(1, 1));
        assert_approximable(&p, &x());
        assert!(matches!(finite_combine(CombineKind::Sum, &[]), Err(Error::EmptyList)));
    }

    #[test]
    fn product_needs_magnitude_bounds() {
        let unbounded = WeightedCountingProblem::from_fn(IntPolynomial::zero(), RangeTag::QPoly, |_, _| rat(1, 3));
        let p = finite_combine(CombineKind::Product, &[unbounded.clone(), unbounded]).unwrap();
        assert!(matches!(approx_sum(&p, &x(), 4), Err(Error::MissingMagnitudeBound)));
        assert_eq!(value(&p), rat(1, 9));
    }

    #[test]
    fn uniform_exp_sum_examples() {
        let one = constant(0, rat(1, 1));
        assert_eq!(value(&uniform_exp_sum(&one, &IntPolynomial::constant(2))), rat(4, 1));
        assert_eq!(
            value(&uniform_exp_sum(&count_of_input(), &IntPolynomial::constant(2))),
            rat(6, 1)
        );
        let zero = WeightedCountingProblem::zero(IntPolynomial::identity());
        assert!(value(&uniform_exp_sum(&zero, &IntPolynomial::constant(3))).is_zero());
    }

    #[test]
    fn uniform_poly_product_examples() {
        let one = constant(0, rat(1, 1));
        assert_eq!(value(&uniform_poly_product(&one, &IntPolynomial::constant(5))), rat(1, 1));
        let p = uniform_poly_product(&count_of_input(), &IntPolynomial::constant(3));
        assert_eq!(value(&p), rat(6, 1));
        assert_approximable(&p, &x());
        let zero_at_two = WeightedCountingProblem::from_fn(IntPolynomial::constant(1), RangeTag::Nat, |z, _| {
            if z.to_u64() == 2 { int(0) } else { int(1) }
        });
        assert!(value(&uniform_poly_product(&zero_at_two, &IntPolynomial::constant(3))).is_zero());
    }

    #[test]
    fn multivariate_examples() {
        let one = constant(0, rat(1, 1));
        let two = constant(0, rat(2, 1));
        let c1 = IntPolynomial::constant(1);
        assert_eq!(value(&multivariate_poly(&one, &two, &c1, &c1)), rat(3, 1));
        let zero = WeightedCountingProblem::zero(IntPolynomial::zero());
        assert!(value(&multivariate_poly(&zero, &two, &c1, &c1)).is_zero());
        let p = multivariate_poly(&one, &one, &IntPolynomial::constant(2), &c1);
        assert_eq!(value(&p), rat(4, 1));
        // q = 0: c alone
        let c = valued(rat(5, 2), 1);
        assert_eq!(value(&multivariate_poly(&c, &two, &IntPolynomial::zero(), &IntPolynomial::constant(3))), rat(5, 2));
    }

    #[test]
    fn multivariate_matches_direct_evaluation() {
        // c(x ++ e) = 1 + #e, f(x ++ i) = i - 1/2, q = 2, r = 2
        let c = WeightedCountingProblem::from_fn(IntPolynomial::constant(1), RangeTag::QPoly, |z, u| {
            if u.get(0) { rat(1, 1) } else { int(z.to_u64()) }
        })
        .with_magnitude_bits(5);
        let f = WeightedCountingProblem::from_fn(IntPolynomial::zero(), RangeTag::QPoly, |z, _| {
            int(z.to_u64()) - rat(1, 2)
        })
        .with_magnitude_bits(2);
        let expr = ClosureExpr::MultivariatePoly {
            c: Box::new(ClosureExpr::leaf(c)),
            f: Box::new(ClosureExpr::leaf(f)),
            q: IntPolynomial::constant(2),
            r: IntPolynomial::constant(2),
        };
        let p = expr.build().unwrap();
        assert_eq!(exact_sum(&p, &x()).unwrap(), expr.evaluate(&x()).unwrap());
        assert_approximable(&p, &x());
    }

    #[test]
    fn sign_decisions() {
        let t = IntPolynomial::constant(4);
        let v = |r: BigRational| WeightedCountingProblem::value(r);
        assert_eq!(rational_sign_decide(&v(rat(1, 2)), &v(rat(-1, 4)), &t, &x()).unwrap(), -1);
        assert_eq!(rational_sign_decide(&v(rat(-1, 1)), &v(rat(-1, 1)), &t, &x()).unwrap(), 1);
        assert_eq!(rational_sign_decide(&v(rat(3, 8)), &v(rat(5, 8)), &t, &x()).unwrap(), 1);
        assert!(matches!(
            rational_sign_decide(&v(rat(1, 64)), &v(rat(1, 1)), &t, &x()),
            Err(Error::PromiseViolated(_))
        ));
    }

    fn leaf_strategy() -> impl Strategy<Value = WeightedCountingProblem> {
        (0u64..3, proptest::collection::vec((-9i64..10, 1i64..8), 8)).prop_map(|(p, ws)| {
            let table: Vec<BigRational> = ws.iter().map(|&(n, d)| rat(n, d)).collect();
            WeightedCountingProblem::from_fn(IntPolynomial::constant(p), RangeTag::QPoly, move |_, u| {
                table[u.to_u64() as usize].clone()
            })
            .with_magnitude_bits(4)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn closure_nodes_are_sound(
            leaves in proptest::collection::vec(leaf_strategy(), 3),
            c in (-20i64..21, 1i64..9),
            node in 0usize..7,
        ) {
            let c = rat(c.0, c.1);
            let l = |i: usize| ClosureExpr::leaf(leaves[i].clone());
            let expr = match node {
                0 => ClosureExpr::AddConst(Box::new(l(0)), c),
                1 => ClosureExpr::Scale(Box::new(l(0)), c),
                2 => ClosureExpr::FiniteSum(vec![l(0), l(1), l(2)]),
                3 => ClosureExpr::FiniteProduct(vec![l(0), l(1), l(2)]),
                4 => ClosureExpr::UniformExpSum(Box::new(l(0)), IntPolynomial::constant(2)),
                5 => ClosureExpr::UniformPolyProduct(Box::new(l(0)), IntPolynomial::constant(2)),
                _ => ClosureExpr::MultivariatePoly {
                    c: Box::new(l(0)),
                    f: Box::new(l(1)),
                    q: IntPolynomial::constant(2),
                    r: IntPolynomial::constant(1),
                },
            };
            let p = expr.build().unwrap();
            let f = exact_sum(&p, &x()).unwrap();
            prop_assert_eq!(&f, &expr.evaluate(&x()).unwrap());
            for b in [1u32, 7, 16] {
                let a = approx_sum(&p, &x(), b).unwrap().to_rational();
                prop_assert!((a - &f).abs() <= BigRational::new(1.into(), pow2(b)));
            }
        }
    }
}
