// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Discrete probabilistic graphical models and their partition functions
//! as weighted counting problems.
//!
//! Variables are indexed from 0. An assignment is encoded with
//! `⌈log₂ card⌉` bits per variable, in variable order; codes at or above a
//! variable's cardinality carry weight 0.

mod format;
pub mod majsat;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{ceil, int};
use crate::bits::{bit_length, BitString};
use crate::counting::exact_sum;
use crate::decide::{decide_threshold, DecisionInstance};
use crate::error::{Error, Result};
use crate::oracle::{FallibleOracle, RangeTag, WeightOracle, WeightedCountingProblem};
use crate::poly::IntPolynomial;

pub use majsat::{majsat_to_pgm, sat_count, Formula};

/// Factor entries: an explicit table or rows served by a weight oracle
/// (row `j` is `exact(input, j)` with `j` in `bitlen(len − 1)` bits).
#[derive(Clone)]
pub enum FactorTable {
    Explicit(Vec<BigRational>),
    Oracle {
        oracle: Arc<dyn WeightOracle>,
        input: BitString,
        len: usize,
    },
}

impl std::fmt::Debug for FactorTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FactorTable::Explicit(t) => f.debug_tuple("Explicit").field(t).finish(),
            FactorTable::Oracle { len, .. } => write!(f, "Oracle({len} rows)"),
        }
    }
}

/// `φ` over `scope`; entries in row-major order, last scope variable fastest.
#[derive(Clone, Debug)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub table: FactorTable,
}

impl Factor {
    pub fn new(scope: Vec<usize>, table: Vec<BigRational>) -> Self {
        Factor { scope, table: FactorTable::Explicit(table) }
    }

    pub fn from_oracle(scope: Vec<usize>, oracle: Arc<dyn WeightOracle>, input: BitString, len: usize) -> Self {
        Factor { scope, table: FactorTable::Oracle { oracle, input, len } }
    }

    pub fn len(&self) -> usize {
        match &self.table {
            FactorTable::Explicit(t) => t.len(),
            FactorTable::Oracle { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, row: usize) -> Result<BigRational> {
        match &self.table {
            FactorTable::Explicit(t) => Ok(t[row].clone()),
            FactorTable::Oracle { oracle, input, len } => {
                let bits = bit_length(len.saturating_sub(1) as u64) as usize;
                oracle.exact(input, &BitString::from_u64(row as u64, bits))
            }
        }
    }

    pub fn entries(&self) -> Result<Vec<BigRational>> {
        (0..self.len()).map(|r| self.entry(r)).collect()
    }

    fn row(&self, cards: &[usize], assignment: &[usize]) -> usize {
        self.scope.iter().fold(0, |r, &v| r * cards[v] + assignment[v])
    }
}

#[derive(Clone, Debug)]
pub struct Pgm {
    cards: Vec<usize>,
    factors: Vec<Factor>,
}

/// `(variable, value)` pairs.
pub type Assignment = [(usize, usize)];

impl Pgm {
    /// Checks cardinalities, scopes, table sizes, nonnegativity and that
    /// the scopes cover every variable.
    pub fn new(cards: Vec<usize>, factors: Vec<Factor>) -> Result<Self> {
        let bad = |m: String| Err(Error::InvariantViolation(m));
        if let Some(i) = cards.iter().position(|&c| c == 0) {
            return bad(format!("variable {i} has cardinality 0"));
        }
        let mut covered = vec![false; cards.len()];
        for (i, f) in factors.iter().enumerate() {
            for (j, &v) in f.scope.iter().enumerate() {
                if v >= cards.len() {
                    return bad(format!("factor {i} mentions unknown variable {v}"));
                }
                if f.scope[..j].contains(&v) {
                    return bad(format!("factor {i} repeats variable {v}"));
                }
                covered[v] = true;
            }
            let want: usize = f.scope.iter().map(|&v| cards[v]).product();
            if f.len() != want {
                return bad(format!("factor {i} has {} entries, expected {want}", f.len()));
            }
            if let FactorTable::Explicit(t) = &f.table {
                if t.iter().any(|e| e.is_negative()) {
                    return bad(format!("factor {i} has a negative entry"));
                }
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return bad(format!("variable {v} is not covered by any factor"));
        }
        Ok(Pgm { cards, factors })
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn num_vars(&self) -> usize {
        self.cards.len()
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        for &(v, x) in a {
            if v >= self.cards.len() || x >= self.cards[v] {
                return Err(Error::Precondition(format!(
                    "assignment {v}={x} outside the model"
                )));
            }
        }
        Ok(())
    }

    fn bits_per_var(&self) -> Vec<usize> {
        self.cards.iter().map(|&c| bit_length(c as u64 - 1) as usize).collect()
    }

    /// `Π_i φ_i(assignment)`, checking for a zero entry before multiplying.
    fn product(&self, assignment: &[usize]) -> Result<BigRational> {
        let mut vals = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let e = f.entry(f.row(&self.cards, assignment))?;
            if e.is_zero() {
                return Ok(e);
            }
            vals.push(e);
        }
        Ok(vals.into_iter().fold(BigRational::one(), |a, b| a * b))
    }

    fn decode(&self, bits: &[usize], u: &BitString) -> Option<Vec<usize>> {
        let mut at = 0;
        let mut out = Vec::with_capacity(bits.len());
        for (&b, &card) in bits.iter().zip(&self.cards) {
            let code = u.slice(at, at + b).to_u64() as usize;
            if code >= card {
                return None;
            }
            out.push(code);
            at += b;
        }
        Some(out)
    }

    fn is_integral(&self) -> bool {
        self.factors.iter().all(|f| match &f.table {
            FactorTable::Explicit(t) => t.iter().all(|e| e.is_integer()),
            FactorTable::Oracle { .. } => false,
        })
    }

    /// The partition function as a weighted counting problem over assignment
    /// encodings, with the path weight `ψ(a) · Π_i φ_i(a)`.
    fn counting_problem_with(
        &self,
        tag: RangeTag,
        psi: impl Fn(&[usize]) -> BigRational + Send + Sync + 'static,
    ) -> WeightedCountingProblem {
        let bits = self.bits_per_var();
        let total: usize = bits.iter().sum();
        let model = self.clone();
        let oracle = FallibleOracle::new(tag, move |_, u| match model.decode(&bits, u) {
            Some(a) => {
                let s = psi(&a);
                if s.is_zero() {
                    return Ok(s);
                }
                Ok(model.product(&a)? * s)
            }
            None => Ok(BigRational::zero()),
        });
        WeightedCountingProblem::new(IntPolynomial::constant(total as u64), oracle)
    }

    /// `Σ_a Π_i φ_i(a)` as a weighted counting problem (input ignored).
    pub fn counting_problem(&self) -> WeightedCountingProblem {
        let tag = if self.is_integral() { RangeTag::Nat } else { RangeTag::QPoly };
        self.counting_problem_with(tag, |_| BigRational::one())
    }

    /// Every full assignment in mixed-radix order.
    fn for_each_assignment(&self, mut f: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
        let n = self.cards.len();
        let mut a = vec![0usize; n];
        loop {
            f(&a)?;
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(());
                }
                i -= 1;
                a[i] += 1;
                if a[i] < self.cards[i] {
                    break;
                }
                a[i] = 0;
            }
        }
    }
}

/// Exact `Z` through the weighted counting problem.
pub fn partition_function(pgm: &Pgm) -> Result<BigRational> {
    exact_sum(&pgm.counting_problem(), &BitString::new())
}

/// Exact `Z` by nested loops over assignments, independent of the encoding.
pub fn partition_function_direct(pgm: &Pgm) -> Result<BigRational> {
    let mut z = BigRational::zero();
    pgm.for_each_assignment(|a| {
        z += pgm.product(a)?;
        Ok(())
    })?;
    Ok(z)
}

/// Integer tables `φ_i · d` with `d` the product of the distinct
/// denominators, and `scale = d^{-m}` so that `Z = scale · Z'`.
pub fn clear_denominators(pgm: &Pgm) -> Result<(Pgm, BigRational)> {
    let mut dens: Vec<BigInt> = Vec::new();
    for f in &pgm.factors {
        for e in f.entries()? {
            if !dens.contains(e.denom()) {
                dens.push(e.denom().clone());
            }
        }
    }
    let d: BigInt = dens.iter().product();
    let factors = pgm
        .factors
        .iter()
        .map(|f| {
            let t = f.entries()?.into_iter().map(|e| e * int(d.clone())).collect();
            Ok(Factor::new(f.scope.clone(), t))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = num_traits::pow::pow(BigRational::new(BigInt::one(), d), pgm.factors.len());
    Ok((Pgm::new(pgm.cards.clone(), factors)?, scale))
}

/// Factor `i` belongs to variable `i`: one factor per variable, `i` in its
/// scope with no larger index, and each conditional table normalized.
pub fn is_bayesian_network(pgm: &Pgm) -> bool {
    if pgm.factors.len() != pgm.cards.len() {
        return false;
    }
    for (i, f) in pgm.factors.iter().enumerate() {
        if !f.scope.contains(&i) || f.scope.iter().any(|&j| j > i) {
            return false;
        }
        let Ok(entries) = f.entries() else { return false };
        // group rows by parent configuration
        let pos = f.scope.iter().position(|&v| v == i).expect("checked");
        let stride: usize = f.scope[pos + 1..].iter().map(|&v| pgm.cards[v]).product();
        let card = pgm.cards[i];
        let block = stride * card;
        for start in (0..entries.len()).step_by(block) {
            for off in 0..stride {
                let s: BigRational = (0..card).map(|x| entries[start + off + x * stride].clone()).sum();
                if !s.is_one() {
                    return false;
                }
            }
        }
    }
    true
}

/// Appends an indicator factor per evidence pair; for a Bayesian network
/// the resulting `Z` is the probability of the evidence.
pub fn query_bn(pgm: &Pgm, evidence: &Assignment) -> Result<Pgm> {
    pgm.check_assignment(evidence)?;
    let mut factors = pgm.factors.clone();
    for &(v, x) in evidence {
        let t = (0..pgm.cards[v]).map(|j| int((j == x) as i64)).collect();
        factors.push(Factor::new(vec![v], t));
    }
    Pgm::new(pgm.cards.clone(), factors)
}

/// `Pr(target | evidence) > threshold`?
#[derive(Clone, Debug)]
pub struct Query {
    pub target: Vec<(usize, usize)>,
    pub evidence: Vec<(usize, usize)>,
    pub threshold: BigRational,
}

fn consistent(a: &[usize], pairs: &Assignment) -> bool {
    pairs.iter().all(|&(v, x)| a[v] == x)
}

/// `Z(target ∧ evidence) / Z(evidence)`.
pub fn conditional_probability(pgm: &Pgm, query: &Query) -> Result<BigRational> {
    pgm.check_assignment(&query.target)?;
    let ze = partition_function(&query_bn(pgm, &query.evidence)?)?;
    if ze.is_zero() {
        return Err(Error::ZeroEvidence);
    }
    let both: Vec<(usize, usize)> = query.target.iter().chain(&query.evidence).copied().collect();
    Ok(partition_function(&query_bn(pgm, &both)?)? / ze)
}

/// The signed problem whose sum is `Z(target ∧ evidence) − q · Z(evidence)`:
/// weight 0 off the evidence, `−q·P(y)` on evidence without target,
/// `(1 − q)·P(y)` on both.
pub fn signed_query_problem(pgm: &Pgm, query: &Query) -> WeightedCountingProblem {
    let (t, e, q) = (query.target.clone(), query.evidence.clone(), query.threshold.clone());
    pgm.counting_problem_with(RangeTag::QPoly, move |a| {
        if !consistent(a, &e) {
            BigRational::zero()
        } else if consistent(a, &t) {
            BigRational::one() - &q
        } else {
            -q.clone()
        }
    })
}

/// A-priori bit bound on the signed sum: `D · S` is an integer for
/// `D = den(q) · Π_i lcm(den φ_i)`, and `|S| ≤ 2^L · Π_i max φ_i · (|q| + 1)`.
fn signed_output_bits(pgm: &Pgm, q: &BigRational) -> Result<u64> {
    let mut d = q.denom().clone();
    let mut m = int(1u64 << pgm.bits_per_var().iter().sum::<usize>()) * (q.abs() + BigRational::one());
    for f in &pgm.factors {
        let es = f.entries()?;
        let l = es.iter().fold(BigInt::one(), |l, e| l.lcm(e.denom()));
        d *= l;
        m *= es.iter().fold(BigRational::zero(), |a, e| a.max(e.abs()));
    }
    let num = ceil(&(m * int(d.clone())));
    Ok(num.bits() + d.bits() + 1)
}

/// Decides `Pr(target | evidence) > q` with two counting-threshold calls:
/// one for `Pr(evidence) > 0`, one on the signed problem.
pub fn conditional_decide(pgm: &Pgm, query: &Query) -> Result<bool> {
    pgm.check_assignment(&query.target)?;
    let evidence = query_bn(pgm, &query.evidence)?.counting_problem();
    // Pr(evidence) > 0 ⇔ not (−Z(evidence) ≥ 0); weights are nonnegative
    let bound = IntPolynomial::constant(signed_output_bits(pgm, &BigRational::zero())?);
    let neg_e = crate::closure::scale(&evidence, &-BigRational::one());
    if decide_threshold(&DecisionInstance::new(neg_e, BigRational::zero(), bound), &BitString::new())? {
        return Err(Error::ZeroEvidence);
    }
    let signed = signed_query_problem(pgm, query);
    let bound = IntPolynomial::constant(signed_output_bits(pgm, &query.threshold)?);
    let neg = crate::closure::scale(&signed, &-BigRational::one());
    let not_above = decide_threshold(&DecisionInstance::new(neg, BigRational::zero(), bound), &BitString::new())?;
    Ok(!not_above)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn two_var() -> Pgm {
        Pgm::new(
            vec![2, 2],
            vec![
                Factor::new(vec![0], vec![rat(1, 1), rat(1, 1)]),
                Factor::new(vec![0, 1], vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]),
            ],
        )
        .unwrap()
    }

    fn uniform(n: usize) -> Pgm {
        Pgm::new(vec![2; n], (0..n).map(|i| Factor::new(vec![i], vec![rat(1, 2), rat(1, 2)])).collect()).unwrap()
    }

    fn chain() -> Pgm {
        Pgm::new(
            vec![2, 3],
            vec![
                Factor::new(vec![0], vec![rat(1, 3), rat(2, 3)]),
                Factor::new(vec![0, 1], vec![rat(1, 2), rat(1, 4), rat(1, 4), rat(0, 1), rat(1, 5), rat(4, 5)]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_function(&two_var()).unwrap(), rat(2, 1));
        assert_eq!(partition_function(&uniform(1)).unwrap(), rat(1, 1));
        let zero = Pgm::new(vec![2], vec![Factor::new(vec![0], vec![rat(0, 1), rat(0, 1)])]).unwrap();
        assert!(partition_function(&zero).unwrap().is_zero());
        assert_eq!(partition_function(&chain()).unwrap(), partition_function_direct(&chain()).unwrap());
    }

    #[test]
    fn invariants_checked() {
        let short = Pgm::new(vec![2], vec![Factor::new(vec![0], vec![rat(1, 1)])]);
        assert!(matches!(short, Err(Error::InvariantViolation(_))));
        let uncovered = Pgm::new(vec![2, 2], vec![Factor::new(vec![0], vec![rat(1, 1), rat(1, 1)])]);
        assert!(matches!(uncovered, Err(Error::InvariantViolation(_))));
        let negative = Pgm::new(vec![2], vec![Factor::new(vec![0], vec![rat(-1, 1), rat(1, 1)])]);
        assert!(matches!(negative, Err(Error::InvariantViolation(_))));
    }

    #[test]
    fn clearing_denominators() {
        let (p, s) = clear_denominators(&two_var()).unwrap();
        assert_eq!(s, rat(1, 1));
        assert_eq!(partition_function(&p).unwrap(), rat(2, 1));
        let (p, s) = clear_denominators(&uniform(1)).unwrap();
        assert_eq!(p.factors()[0].entries().unwrap(), vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(s * partition_function(&p).unwrap(), rat(1, 1));
        let (p, s) = clear_denominators(&chain()).unwrap();
        assert!(p.is_integral());
        assert_eq!(s * partition_function(&p).unwrap(), partition_function_direct(&chain()).unwrap());
    }

    #[test]
    fn bn_conditions() {
        assert!(is_bayesian_network(&chain()));
        assert!(is_bayesian_network(&uniform(3)));
        assert_eq!(partition_function(&chain()).unwrap(), rat(1, 1));
        let heavy = Pgm::new(vec![2], vec![Factor::new(vec![0], vec![rat(1, 2), rat(1, 1)])]).unwrap();
        assert!(!is_bayesian_network(&heavy));
        let shared = Pgm::new(
            vec![2, 2],
            vec![
                Factor::new(vec![0], vec![rat(1, 2), rat(1, 2)]),
                Factor::new(vec![0], vec![rat(1, 2), rat(1, 2)]),
                Factor::new(vec![1], vec![rat(1, 2), rat(1, 2)]),
            ],
        )
        .unwrap();
        assert!(!is_bayesian_network(&shared));
        assert!(!is_bayesian_network(&two_var()));
    }

    #[test]
    fn queries() {
        assert_eq!(partition_function(&query_bn(&uniform(1), &[(0, 1)]).unwrap()).unwrap(), rat(1, 2));
        assert_eq!(partition_function(&query_bn(&uniform(2), &[]).unwrap()).unwrap(), rat(1, 1));
        assert!(partition_function(&query_bn(&uniform(1), &[(0, 1), (0, 0)]).unwrap()).unwrap().is_zero());
        assert!(query_bn(&uniform(1), &[(0, 2)]).is_err());
    }

    fn q(target: &[(usize, usize)], evidence: &[(usize, usize)], t: BigRational) -> Query {
        Query { target: target.to_vec(), evidence: evidence.to_vec(), threshold: t }
    }

    #[test]
    fn conditionals() {
        let u = uniform(2);
        assert_eq!(conditional_probability(&u, &q(&[(0, 1)], &[(1, 1)], rat(0, 1))).unwrap(), rat(1, 2));
        assert_eq!(conditional_probability(&u, &q(&[(0, 1)], &[(0, 1)], rat(0, 1))).unwrap(), rat(1, 1));
        assert!(conditional_probability(&u, &q(&[(0, 0)], &[(0, 1)], rat(0, 1))).unwrap().is_zero());
        assert!(conditional_decide(&u, &q(&[(0, 1)], &[(1, 1)], rat(1, 3))).unwrap());
        assert!(!conditional_decide(&u, &q(&[(0, 1)], &[(1, 1)], rat(1, 2))).unwrap());
        assert!(conditional_decide(&u, &q(&[(0, 1)], &[(1, 1)], rat(0, 1))).unwrap());
        let zero_ev = q(&[(0, 1)], &[(0, 1), (0, 0)], rat(0, 1));
        assert!(matches!(conditional_probability(&u, &zero_ev), Err(Error::ZeroEvidence)));
        assert!(matches!(conditional_decide(&u, &zero_ev), Err(Error::ZeroEvidence)));
    }

    #[test]
    fn decisions_on_chain() {
        let c = chain();
        for target in 0..3 {
            for ev in 0..2 {
                let query = q(&[(1, target)], &[(0, ev)], rat(0, 1));
                let p = conditional_probability(&c, &query).unwrap();
                for t in [rat(0, 1), rat(1, 5), rat(1, 4), rat(1, 2), rat(4, 5), p.clone()] {
                    let qq = Query { threshold: t.clone(), ..query.clone() };
                    assert_eq!(conditional_decide(&c, &qq).unwrap(), p > t, "target {target} ev {ev} t {t}");
                }
            }
        }
    }

    #[test]
    fn oracle_backed_factor() {
        let o = WeightedCountingProblem::from_fn(IntPolynomial::zero(), RangeTag::QPoly, |_, u| {
            rat(1 + u.to_u64() as i64, 3)
        });
        let f = Factor::from_oracle(vec![0], o.oracle().clone(), BitString::new(), 2);
        let p = Pgm::new(vec![2], vec![f]).unwrap();
        assert_eq!(partition_function(&p).unwrap(), rat(1, 1));
        assert!(is_bayesian_network(&p));
    }
}
