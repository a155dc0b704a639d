// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Two-stage stochastic optimization over independent binary events.
//!
//! The expected cost `c(x) + E_A[f_A(x)]` is the weighted count over
//! scenarios `A` with weight `Pr(A) · (c(x) + f_A(x))`; the probabilities sum
//! to 1, so the first-stage cost rides along on every path.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::arith::{ceil, int, parse_rational, Dyadic};
use crate::bits::BitString;
use crate::counting::{approx_sum, exact_sum};
use crate::decide::{decide_threshold, DecisionInstance};
use crate::error::{Error, Result};
use crate::oracle::{FallibleOracle, RangeTag, WeightedCountingProblem};
use crate::poly::IntPolynomial;

pub const MAX_EVENTS: usize = 20;
pub const MAX_FIRST_STAGE_BITS: usize = 16;

/// Independent events; event `i` occurs with probability `p_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventModel {
    probs: Vec<BigRational>,
}

impl EventModel {
    pub fn new(probs: Vec<BigRational>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|p| p.is_negative() || **p > BigRational::one()) {
            return Err(Error::InvariantViolation(format!("event probability {p} outside [0, 1]")));
        }
        Ok(EventModel { probs })
    }

    pub fn probs(&self) -> &[BigRational] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Π p_i^{A_i} (1 − p_i)^{1 − A_i}`.
    pub fn probability(&self, outcome: &BitString) -> BigRational {
        self.probs
            .iter()
            .zip(outcome.bits())
            .map(|(p, &a)| if a { p.clone() } else { BigRational::one() - p })
            .fold(BigRational::one(), |acc, q| acc * q)
    }

    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        if self.len() > MAX_EVENTS {
            return Err(Error::CapExceeded { needed: self.len() as u64, cap: MAX_EVENTS as u32 });
        }
        Ok(BitString::all(self.len())
            .map(|outcome| Scenario { probability: self.probability(&outcome), outcome })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub outcome: BitString,
    pub probability: BigRational,
}

pub type FirstCost = Arc<dyn Fn(&BitString) -> BigRational + Send + Sync>;
/// Total second-stage cost for a first-stage decision and a realized scenario.
pub type RecourseCost = Arc<dyn Fn(&BitString, &BitString) -> BigRational + Send + Sync>;

/// One preselection item: upfront cost, penalty when needed but not
/// preselected, probability of being needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub cost: BigRational,
    pub penalty: BigRational,
    pub prob: BigRational,
}

#[derive(Clone)]
pub struct TwoStageProblem {
    first_stage_bits: usize,
    events: EventModel,
    first_cost: FirstCost,
    recourse_cost: RecourseCost,
    items: Option<Vec<Item>>,
}

impl fmt::Debug for TwoStageProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoStageProblem")
            .field("first_stage_bits", &self.first_stage_bits)
            .field("events", &self.events)
            .field("items", &self.items)
            .finish_non_exhaustive()
    }
}

impl TwoStageProblem {
    pub fn new(
        first_stage_bits: usize,
        events: EventModel,
        first_cost: impl Fn(&BitString) -> BigRational + Send + Sync + 'static,
        recourse_cost: impl Fn(&BitString, &BitString) -> BigRational + Send + Sync + 'static,
    ) -> Self {
        TwoStageProblem {
            first_stage_bits,
            events,
            first_cost: Arc::new(first_cost),
            recourse_cost: Arc::new(recourse_cost),
            items: None,
        }
    }

    /// Item `i` is preselected when `x_i = 1`; event `i` is "item `i` is
    /// needed", and each needed item that was not preselected costs its penalty.
    pub fn preselection(items: Vec<Item>) -> Result<Self> {
        let events = EventModel::new(items.iter().map(|i| i.prob.clone()).collect())?;
        let (first, second) = (items.clone(), items.clone());
        let mut p = TwoStageProblem::new(
            items.len(),
            events,
            move |x| first.iter().zip(x.bits()).filter(|(_, &s)| s).map(|(i, _)| i.cost.clone()).sum(),
            move |x, a| {
                second
                    .iter()
                    .zip(x.bits().iter().zip(a.bits()))
                    .filter(|(_, (&s, &need))| need && !s)
                    .map(|(i, _)| i.penalty.clone())
                    .sum()
            },
        );
        p.items = Some(items);
        Ok(p)
    }

    pub fn first_stage_bits(&self) -> usize {
        self.first_stage_bits
    }

    pub fn events(&self) -> &EventModel {
        &self.events
    }

    pub fn items(&self) -> Option<&[Item]> {
        self.items.as_deref()
    }

    pub fn first_cost(&self, x: &BitString) -> BigRational {
        (self.first_cost)(x)
    }

    pub fn recourse_cost(&self, x: &BitString, scenario: &BitString) -> BigRational {
        (self.recourse_cost)(x, scenario)
    }

    fn check_x(&self, x: &BitString) -> Result<()> {
        if x.len() != self.first_stage_bits {
            return Err(Error::Precondition(format!(
                "first-stage decision has {} bits, expected {}",
                x.len(),
                self.first_stage_bits
            )));
        }
        Ok(())
    }

    /// Scenario weights `sign · Pr(A) · (c(x) + f_A(x))`; the input is `x`.
    fn counting_problem(&self, sign: i64) -> Result<WeightedCountingProblem> {
        if self.events.len() > MAX_EVENTS {
            return Err(Error::CapExceeded { needed: self.events.len() as u64, cap: MAX_EVENTS as u32 });
        }
        let model = self.clone();
        let oracle = FallibleOracle::new(RangeTag::QPoly, move |x, a| {
            let pr = model.events.probability(a);
            if pr.is_zero() {
                return Ok(pr);
            }
            Ok(pr * (model.first_cost(x) + model.recourse_cost(x, a)) * int(sign))
        });
        Ok(WeightedCountingProblem::new(IntPolynomial::constant(self.events.len() as u64), oracle))
    }

    pub fn weighted_counting_problem(&self) -> Result<WeightedCountingProblem> {
        self.counting_problem(1)
    }

    /// Bit bound on the exact expected cost of any `x` for the preselection
    /// family, from denominators and magnitudes of the item data.
    pub fn output_bit_bound(&self) -> Option<u64> {
        let items = self.items.as_ref()?;
        let mut d = BigInt::one();
        let mut m = BigRational::zero();
        for i in items {
            d = d.lcm(i.cost.denom()) * i.penalty.denom() * i.prob.denom();
            m += i.cost.abs() + i.penalty.abs();
        }
        let num = ceil(&(m * int(d.clone())));
        Some(num.bits() + d.bits() + 1)
    }
}

/// Exact `c(x) + Σ_A Pr(A) f_A(x)` via the scenario counting problem.
pub fn expected_cost(problem: &TwoStageProblem, x: &BitString) -> Result<BigRational> {
    problem.check_x(x)?;
    exact_sum(&problem.weighted_counting_problem()?, x)
}

/// The same expectation by a direct loop over scenarios.
pub fn expected_cost_direct(problem: &TwoStageProblem, x: &BitString) -> Result<BigRational> {
    problem.check_x(x)?;
    let recourse: BigRational = problem
        .events
        .scenarios()?
        .into_iter()
        .map(|s| s.probability * problem.recourse_cost(x, &s.outcome))
        .sum();
    Ok(problem.first_cost(x) + recourse)
}

/// Within `2^{-b}` of the expected cost.
pub fn expected_cost_approx(problem: &TwoStageProblem, x: &BitString, b: u32) -> Result<Dyadic> {
    problem.check_x(x)?;
    approx_sum(&problem.weighted_counting_problem()?, x, b)
}

/// `expected_cost(x) ≤ t`, decided as `−cost ≥ −t`; `q` bounds the bits of
/// the exact cost and falls back to the preselection bound.
pub fn decide_cost(problem: &TwoStageProblem, x: &BitString, t: &BigRational, q: Option<u64>) -> Result<bool> {
    problem.check_x(x)?;
    let q = q.or_else(|| problem.output_bit_bound()).ok_or(Error::MissingBound)?;
    let instance = DecisionInstance::new(problem.counting_problem(-1)?, -t.clone(), IntPolynomial::constant(q));
    decide_threshold(&instance, x)
}

/// Exhaustive argmin over first-stage decisions; ties go to the
/// lexicographically smallest `x`.
pub fn best_solution(problem: &TwoStageProblem) -> Result<(BitString, BigRational)> {
    if problem.first_stage_bits > MAX_FIRST_STAGE_BITS {
        return Err(Error::CapExceeded {
            needed: problem.first_stage_bits as u64,
            cap: MAX_FIRST_STAGE_BITS as u32,
        });
    }
    let costs = BitString::all(problem.first_stage_bits)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|x| expected_cost(problem, &x).map(|c| (x, c)))
        .collect::<Result<Vec<_>>>()?;
    // all() yields lexicographic order, and min_by keeps the first minimum
    let best = costs.into_iter().reduce(|a, b| if b.1 < a.1 { b } else { a });
    Ok(best.expect("at least one first-stage decision"))
}

/// Parses the `WC2SSP` preselection format: item count, then `c r p` lines.
impl FromStr for TwoStageProblem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let last = s.lines().count();
        let (ln, magic) = lines.next().ok_or_else(|| Error::parse(last, "missing header"))?;
        if magic != "WC2SSP" {
            return Err(Error::parse(ln, "expected WC2SSP header"));
        }
        let (ln, m) = lines.next().ok_or_else(|| Error::parse(last, "missing item count"))?;
        let m: usize = m.parse().map_err(|_| Error::parse(ln, "bad item count"))?;
        let mut items = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or_else(|| Error::parse(last, "missing item line"))?;
            let fields = line
                .split_whitespace()
                .map(|t| parse_rational(t).map_err(|_| Error::parse(ln, format!("bad rational {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let [cost, penalty, prob] = <[BigRational; 3]>::try_from(fields)
                .map_err(|f| Error::parse(ln, format!("expected 3 fields, found {}", f.len())))?;
            items.push(Item { cost, penalty, prob });
        }
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content"));
        }
        TwoStageProblem::preselection(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn item(c: i64, r: i64, p: BigRational) -> Item {
        Item { cost: rat(c, 1), penalty: rat(r, 1), prob: p }
    }

    fn two_items() -> TwoStageProblem {
        TwoStageProblem::preselection(vec![item(1, 3, rat(1, 2)), item(4, 2, rat(1, 4))]).unwrap()
    }

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn closed_form(items: &[Item], x: &BitString) -> BigRational {
        items
            .iter()
            .zip(x.bits())
            .map(|(i, &s)| if s { i.cost.clone() } else { &i.prob * &i.penalty })
            .sum()
    }

    #[test]
    fn expected_cost_examples() {
        let p = two_items();
        assert_eq!(expected_cost(&p, &bits("10")).unwrap(), rat(3, 2));
        for (x, c) in [("00", rat(2, 1)), ("01", rat(11, 2)), ("11", rat(5, 1))] {
            assert_eq!(expected_cost(&p, &bits(x)).unwrap(), c);
        }
        let free = TwoStageProblem::new(1, EventModel::new(vec![rat(1, 3)]).unwrap(), |_| rat(7, 3), |_, _| rat(0, 1));
        assert_eq!(expected_cost(&free, &bits("1")).unwrap(), rat(7, 3));
        let point = TwoStageProblem::new(
            1,
            EventModel::new(vec![rat(0, 1), rat(0, 1)]).unwrap(),
            |_| rat(1, 1),
            |_, a| if a.is_all_zero() { rat(5, 1) } else { rat(100, 1) },
        );
        assert_eq!(expected_cost(&point, &bits("0")).unwrap(), rat(6, 1));
        assert!(expected_cost(&p, &bits("1")).is_err());
    }

    #[test]
    fn approx_examples() {
        let p = two_items();
        let a = expected_cost_approx(&p, &bits("10"), 10).unwrap().to_rational();
        assert!((a - rat(3, 2)).abs() <= rat(1, 1024));
        let zero = TwoStageProblem::new(2, EventModel::new(vec![rat(1, 3)]).unwrap(), |_| rat(0, 1), |_, _| rat(0, 1));
        assert!(expected_cost_approx(&zero, &bits("01"), 5).unwrap().to_rational().is_zero());
        for x in ["00", "01", "10", "11"] {
            let exact = expected_cost(&p, &bits(x)).unwrap();
            assert_eq!(expected_cost_approx(&p, &bits(x), 3).unwrap().to_rational(), exact);
        }
    }

    #[test]
    fn decide_examples() {
        let p = two_items();
        let x = bits("10");
        assert!(decide_cost(&p, &x, &rat(2, 1), None).unwrap());
        assert!(!decide_cost(&p, &x, &rat(1, 1), None).unwrap());
        assert!(decide_cost(&p, &x, &rat(3, 2), None).unwrap());
        assert!(!decide_cost(&p, &x, &rat(149, 100), None).unwrap());
        let custom = TwoStageProblem::new(1, EventModel::new(vec![]).unwrap(), |_| rat(1, 1), |_, _| rat(0, 1));
        assert!(matches!(decide_cost(&custom, &bits("0"), &rat(1, 1), None), Err(Error::MissingBound)));
        assert!(decide_cost(&custom, &bits("0"), &rat(1, 1), Some(4)).unwrap());
    }

    #[test]
    fn best_solution_examples() {
        assert_eq!(best_solution(&two_items()).unwrap(), (bits("10"), rat(3, 2)));
        let flat = TwoStageProblem::new(3, EventModel::new(vec![rat(1, 2)]).unwrap(), |_| rat(1, 1), |_, _| rat(1, 1));
        assert_eq!(best_solution(&flat).unwrap(), (bits("000"), rat(2, 1)));
        let single = TwoStageProblem::preselection(vec![item(0, 5, rat(1, 7))]).unwrap();
        assert_eq!(best_solution(&single).unwrap().0, bits("1"));
        let unneeded = TwoStageProblem::preselection(vec![item(0, 5, rat(0, 1))]).unwrap();
        assert_eq!(best_solution(&unneeded).unwrap().0, bits("0"));
    }

    #[test]
    fn parse_format() {
        let p: TwoStageProblem = "WC2SSP\n2\n1 3 1/2\n4 2 1/4\n".parse().unwrap();
        assert_eq!(expected_cost(&p, &bits("10")).unwrap(), rat(3, 2));
        assert!(matches!("WC2SSP\n1\n1 2\n".parse::<TwoStageProblem>(), Err(Error::Parse { line: 3, .. })));
        assert!(matches!("WC2SSP\n1\n1 2 3/2\n".parse::<TwoStageProblem>(), Err(Error::InvariantViolation(_))));
        assert!(matches!("SSP\n".parse::<TwoStageProblem>(), Err(Error::Parse { line: 1, .. })));
    }

    fn arb_items() -> impl Strategy<Value = Vec<Item>> {
        prop::collection::vec(
            (0i64..20, 1i64..10, 0i64..30, 1i64..10, 0i64..=8).prop_map(|(c, cd, r, rd, p)| Item {
                cost: rat(c, cd),
                penalty: rat(r, rd),
                prob: rat(p, 8),
            }),
            1..6,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn evaluation_agrees(items in arb_items(), seed in any::<u64>()) {
            let p = TwoStageProblem::preselection(items.clone()).unwrap();
            let x = BitString::from_u64(seed % (1 << items.len()), items.len());
            let exact = expected_cost(&p, &x).unwrap();
            prop_assert_eq!(&exact, &expected_cost_direct(&p, &x).unwrap());
            prop_assert_eq!(&exact, &closed_form(&items, &x));
            let total: BigRational = p.events().scenarios().unwrap().into_iter().map(|s| s.probability).sum();
            prop_assert!(total.is_one());
            let (bx, bc) = best_solution(&p).unwrap();
            prop_assert_eq!(&bc, &expected_cost(&p, &bx).unwrap());
            prop_assert!(bc <= exact.clone());
            prop_assert!(decide_cost(&p, &x, &exact, None).unwrap());
            prop_assert!(!decide_cost(&p, &x, &(exact - rat(1, 1000)), None).unwrap());
        }
    }
}
