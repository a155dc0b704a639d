// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded property checks that compare each module against an independent
//! brute-force oracle. Every check draws its instances from a ChaCha8 stream
//! seeded with `seed ^ index`, so a run is reproducible from its seed.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{ceil, int, pow2, rat};
use crate::bits::BitString;
use crate::closure::ClosureExpr;
use crate::counting::{approx_sum, exact_sum};
use crate::decide::{decide_threshold, DecisionInstance};
use crate::error::Result;
use crate::halting::{halting_oracle, ToyMachine};
use crate::newman::{newman_grid_error, pp_intersect_decide, pp_truthtable_decide, gap_value, GapInstance, TruthTable};
use crate::oracle::{ApproxOracle, RangeTag, WeightedCountingProblem};
use crate::pgm::{self, Factor, Pgm, Query};
use crate::poly::IntPolynomial;
use crate::primes::{encode_natural, prime_gap_check, prime_reciprocal_oracle, primorial};
use crate::quantum::{defer_measurements, pathsum_parts, statevector_accept, Circuit, Gate, Op};
use crate::recover::{recover_rational, solve_bounded_output};
use crate::reductions::{
    apply_reduction, embed_binary_in_pm1, embed_ternary_in_nat, int_to_binary, lift_int_to_ternary,
    lift_nat_to_binary,
};
use crate::stochastic::{best_solution, expected_cost, Item, TwoStageProblem};

/// Outcome of one check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
    pub elapsed: Duration,
    pub time_limit: Option<Duration>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.time_limit.map_or(true, |l| self.elapsed <= l)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict}  {:<26} {:>6} cases  {:>8.2}s", self.name, self.cases, self.elapsed.as_secs_f64())?;
        if let Some(l) = self.time_limit {
            write!(f, " (limit {}s)", l.as_secs())?;
        }
        if let Some(first) = self.failures.first() {
            write!(f, "  {} failures, first: {first}", self.failures.len())?;
        }
        Ok(())
    }
}

/// Collects case outcomes; errors count as failures.
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, failures: Vec::new() }
    }

    fn check(&mut self, label: impl FnOnce() -> String, outcome: Result<bool>) {
        self.cases += 1;
        match outcome {
            Ok(true) => {}
            Ok(false) => self.failures.push(label()),
            Err(e) => self.failures.push(format!("{}: {e}", label())),
        }
    }
}

type CheckFn = fn(&mut ChaCha8Rng, &mut Tally);

struct Check {
    name: &'static str,
    limit_secs: Option<u64>,
    run: CheckFn,
}

const CHECKS: [Check; 11] = [
    Check { name: "approximation", limit_secs: Some(120), run: approximation },
    Check { name: "reduction round trips", limit_secs: None, run: reduction_round_trips },
    Check { name: "rational recovery", limit_secs: None, run: rational_recovery },
    Check { name: "threshold decision", limit_secs: None, run: threshold_decision },
    Check { name: "closure calculus", limit_secs: None, run: closure_calculus },
    Check { name: "newman and pp closure", limit_secs: Some(60), run: newman_and_pp },
    Check { name: "quantum path pairs", limit_secs: Some(180), run: quantum_path_pairs },
    Check { name: "pgm stack", limit_secs: None, run: pgm_stack },
    Check { name: "prime reciprocals", limit_secs: None, run: prime_reciprocals },
    Check { name: "stochastic stack", limit_secs: None, run: stochastic_stack },
    Check { name: "halting oracle", limit_secs: None, run: halting },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs check `index` (0-based, in [`check_names`] order).
pub fn run_check(index: usize, seed: u64) -> CheckReport {
    let check = &CHECKS[index];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index as u64);
    let mut tally = Tally::new();
    let start = Instant::now();
    (check.run)(&mut rng, &mut tally);
    CheckReport {
        name: check.name,
        cases: tally.cases,
        failures: tally.failures,
        elapsed: start.elapsed(),
        time_limit: check.limit_secs.map(Duration::from_secs),
    }
}

pub fn run_all(seed: u64) -> Vec<CheckReport> {
    (0..CHECKS.len()).map(|i| run_check(i, seed)).collect()
}

fn x0() -> BitString {
    BitString::new()
}

/// Direct `Σ_u w(x, u)` over the problem's weights.
fn brute_sum(problem: &WeightedCountingProblem, x: &BitString) -> Result<BigRational> {
    let n = problem.checked_path_len(x)?;
    BitString::all(n).try_fold(BigRational::zero(), |s, u| Ok(s + problem.weight(x, &u)?))
}

fn table_problem(p: u64, tag: RangeTag, table: Vec<BigRational>) -> WeightedCountingProblem {
    WeightedCountingProblem::from_fn(IntPolynomial::constant(p), tag, move |_, u| table[u.to_u64() as usize].clone())
}

fn random_rational(rng: &mut ChaCha8Rng, num: i64, den_bits: u32) -> BigRational {
    rat(rng.gen_range(-num..=num), rng.gen_range(1..=1i64 << den_bits))
}

/// Bit bound on `Σ table`: the sum times the lcm of denominators is an integer.
fn table_output_bits(table: &[BigRational]) -> u64 {
    let d = table.iter().fold(BigInt::one(), |l, w| l.lcm(w.denom()));
    let m: BigRational = table.iter().map(|w| w.abs()).sum();
    ceil(&(m * int(d.clone()))).bits() + d.bits() + 1
}

/// `Σ table` as an unreduced fraction `N / D` with `D > 0`, summed pairwise
/// so no gcd is ever taken.
fn integer_sum(table: &[BigRational]) -> (BigInt, BigInt) {
    match table {
        [] => (BigInt::zero(), BigInt::one()),
        [w] => (w.numer().clone(), w.denom().clone()),
        _ => {
            let (a, b) = table.split_at(table.len() / 2);
            let ((n1, d1), (n2, d2)) = (integer_sum(a), integer_sum(b));
            (n1 * &d2 + n2 * &d1, d1 * d2)
        }
    }
}

fn approximation(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..500 {
        let p = rng.gen_range(0..=12u64);
        let table: Vec<BigRational> = (0..1usize << p).map(|_| random_rational(rng, 1 << 18, 16)).collect();
        let (n, l) = integer_sum(&table);
        // alternate nearest-rounding oracles with floor-rounding ones
        let problem = if i % 2 == 0 {
            table_problem(p, RangeTag::QPoly, table)
        } else {
            let oracle = ApproxOracle::new(
                RangeTag::QPoly,
                move |_, u, b| {
                    let w = &table[u.to_u64() as usize];
                    (w.numer() << b as usize).div_floor(w.denom())
                },
                None,
            )
            .expect("QPOLY does not require an exact map")
            .with_magnitude_bits(3);
            WeightedCountingProblem::new(IntPolynomial::constant(p), oracle)
        };
        for b in 1..=32u32 {
            // with e ≥ b: |v/2^e − n/l| ≤ 2^-b  ⇔  |v·l − n·2^e| ≤ l·2^(e−b)
            let outcome = approx_sum(&problem, &x0(), b).map(|a| {
                let e = a.exponent().max(b) as usize;
                let v = a.mantissa() << (e - a.exponent() as usize);
                (v * &l - (&n << e)).abs() <= &l << (e - b as usize)
            });
            t.check(|| format!("oracle {i} (p = {p}) at b = {b}"), outcome);
        }
    }
}

fn reduction_round_trips(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..100 {
        let p = rng.gen_range(0..=4u64);
        let q = rng.gen_range(1..=4u32);
        let len = 1usize << p;
        let nat: Vec<BigRational> = (0..len).map(|_| int(rng.gen_range(0..1i64 << q))).collect();
        let ints: Vec<BigRational> = (0..len).map(|_| int(rng.gen_range(-(1i64 << q) + 1..1i64 << q))).collect();
        let b01: Vec<BigRational> = (0..len).map(|_| int(rng.gen_range(0..=1))).collect();
        let t101: Vec<BigRational> = (0..len).map(|_| int(rng.gen_range(-1..=1))).collect();
        let sum = |v: &[BigRational]| v.iter().sum::<BigRational>();
        let bound = IntPolynomial::constant(q as u64);

        let f = table_problem(p, RangeTag::Nat, nat.clone());
        t.check(
            || format!("nat -> binary #{i}"),
            lift_nat_to_binary(&f, &bound).and_then(|g| Ok(brute_sum(&g, &x0())? == sum(&nat))),
        );
        let f = table_problem(p, RangeTag::Int, ints.clone());
        t.check(
            || format!("int -> ternary #{i}"),
            lift_int_to_ternary(&f, &bound).and_then(|g| Ok(brute_sum(&g, &x0())? == sum(&ints))),
        );
        t.check(
            || format!("int -> binary #{i}"),
            int_to_binary(&f, &bound).and_then(|(g, red)| {
                Ok(apply_reduction(&red, &brute_sum(&g, &x0())?, &x0()) == sum(&ints))
            }),
        );
        let f = table_problem(p, RangeTag::B01, b01.clone());
        t.check(
            || format!("binary -> pm1 #{i}"),
            embed_binary_in_pm1(&f).and_then(|(g, red)| {
                Ok(apply_reduction(&red, &brute_sum(&g, &x0())?, &x0()) == sum(&b01))
            }),
        );
        let f = table_problem(p, RangeTag::T101, t101.clone());
        t.check(
            || format!("ternary -> nat #{i}"),
            embed_ternary_in_nat(&f).and_then(|(g, red)| {
                Ok(apply_reduction(&red, &brute_sum(&g, &x0())?, &x0()) == sum(&t101))
            }),
        );
    }
}

fn rational_recovery(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..200 {
        let den_bits = rng.gen_range(1..=15u32);
        let num_bits = rng.gen_range(0..=16 - den_bits);
        let den = rng.gen_range(1i64 << (den_bits - 1)..1i64 << den_bits);
        let num = if num_bits == 0 { 0 } else { rng.gen_range(1i64 << (num_bits - 1)..1i64 << num_bits) };
        let r = rat(if rng.gen() { num } else { -num }, den);
        // an interval of width 2^-34 placed at a random offset around r
        let width = BigRational::new(BigInt::one(), pow2(34));
        let offset = &width * rat(rng.gen_range(0..=1000), 1000);
        let lo = &r - &offset;
        let hi = &lo + &width;
        t.check(|| format!("interval around {r} (#{i})"), recover_rational(&lo, &hi, 16).map(|s| s == r));
        // the same value spread over 2^3 paths, recovered from one approximation
        let share = &r / int(8);
        let problem = WeightedCountingProblem::constant(IntPolynomial::constant(3), share);
        t.check(
            || format!("bounded output {r} (#{i})"),
            solve_bounded_output(&problem, &x0(), &IntPolynomial::constant(16)).map(|s| s == r),
        );
    }
}

fn threshold_decision(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..500 {
        let p = rng.gen_range(0..=6u64);
        let table: Vec<BigRational> = (0..1usize << p).map(|_| random_rational(rng, 64, 6)).collect();
        let f: BigRational = table.iter().sum();
        let bits = table_output_bits(&table);
        let threshold = if i < 50 {
            f.clone()
        } else {
            match rng.gen_range(0..3) {
                0 => random_rational(rng, 1 << 8, 6),
                1 => &f + rat(rng.gen_range(-3..=3), rng.gen_range(1..=1 << 12)),
                _ => &f + BigRational::new(BigInt::from(rng.gen_range(-1..=1)), pow2(rng.gen_range(20..40))),
            }
        };
        let want = f >= threshold;
        let instance = DecisionInstance::new(
            table_problem(p, RangeTag::QPoly, table),
            threshold.clone(),
            IntPolynomial::constant(bits),
        );
        t.check(
            || format!("f = {f} vs t = {threshold} (#{i})"),
            decide_threshold(&instance, &x0()).map(|got| got == want),
        );
    }
}

fn closure_leaf(rng: &mut ChaCha8Rng) -> ClosureExpr {
    let p = rng.gen_range(0..=2u64);
    let table: Vec<BigRational> = (0..1usize << p).map(|_| random_rational(rng, 9, 3)).collect();
    ClosureExpr::leaf(table_problem(p, RangeTag::QPoly, table).with_magnitude_bits(4))
}

/// Leaf whose value depends on the input: `x ↦ a + b · #x`.
fn input_leaf(rng: &mut ChaCha8Rng) -> ClosureExpr {
    let (a, b) = (random_rational(rng, 6, 2), random_rational(rng, 3, 2));
    let p = WeightedCountingProblem::from_fn(IntPolynomial::zero(), RangeTag::QPoly, move |x, _| {
        &a + &b * int(x.to_u64())
    })
    .with_magnitude_bits(7);
    ClosureExpr::leaf(p)
}

fn closure_calculus(rng: &mut ChaCha8Rng, t: &mut Tally) {
    let kinds = ["AddConst", "Scale", "FiniteSum", "FiniteProduct", "UniformExpSum", "UniformPolyProduct", "MultivariatePoly"];
    for kind in kinds {
        for i in 0..100 {
            let c = random_rational(rng, 20, 3);
            let k = rng.gen_range(1..=4);
            let expr = match kind {
                "AddConst" => ClosureExpr::AddConst(Box::new(closure_leaf(rng)), c),
                "Scale" => ClosureExpr::Scale(Box::new(closure_leaf(rng)), c),
                "FiniteSum" => ClosureExpr::FiniteSum((0..k).map(|_| closure_leaf(rng)).collect()),
                "FiniteProduct" => ClosureExpr::FiniteProduct((0..k).map(|_| closure_leaf(rng)).collect()),
                "UniformExpSum" => {
                    let leaf = if rng.gen() { closure_leaf(rng) } else { input_leaf(rng) };
                    ClosureExpr::UniformExpSum(Box::new(leaf), IntPolynomial::constant(rng.gen_range(0..=3)))
                }
                "UniformPolyProduct" => {
                    let leaf = if rng.gen() { closure_leaf(rng) } else { input_leaf(rng) };
                    ClosureExpr::UniformPolyProduct(Box::new(leaf), IntPolynomial::constant(rng.gen_range(1..=3)))
                }
                _ => ClosureExpr::MultivariatePoly {
                    c: Box::new(if rng.gen() { closure_leaf(rng) } else { input_leaf(rng) }),
                    f: Box::new(if rng.gen() { closure_leaf(rng) } else { input_leaf(rng) }),
                    q: IntPolynomial::constant(rng.gen_range(0..=2)),
                    r: IntPolynomial::constant(rng.gen_range(1..=2)),
                },
            };
            let outcome = expr.build().and_then(|p| Ok(exact_sum(&p, &x0())? == expr.evaluate(&x0())?));
            t.check(|| format!("{kind} #{i}"), outcome);
        }
    }
}

fn newman_and_pp(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for m in [4, 9, 16, 25, 36] {
        t.check(|| format!("grid bound at m = {m}"), newman_grid_error(m, 1001).map(|r| r.holds()));
    }
    for i in 0..200 {
        let k = rng.gen_range(1..=3usize);
        let len = rng.gen_range(0..=3u32);
        let values: Vec<i64> = (0..k).map(|_| rng.gen_range(-(1i64 << len)..=1i64 << len)).collect();
        let problems = match values.iter().map(|&v| gap_value(v, len)).collect::<Result<Vec<_>>>() {
            Ok(ps) => ps,
            Err(e) => {
                t.check(|| format!("gap instance #{i}"), Err(e));
                continue;
            }
        };
        let inst = GapInstance { problems, magnitude_poly: IntPolynomial::constant(len as u64) };
        let hard: Vec<bool> = values.iter().map(|&v| v >= 0).collect();
        t.check(
            || format!("intersection of {values:?}"),
            pp_intersect_decide(&inst, &x0()).map(|got| got == hard.iter().all(|&b| b)),
        );
        let table = TruthTable::from_fn(k, {
            let bits: Vec<bool> = (0..1 << k).map(|_| rng.gen()).collect();
            move |b| bits[b.iter().fold(0, |s, &v| s << 1 | v as usize)]
        });
        t.check(
            || format!("truth table on {values:?}"),
            pp_truthtable_decide(&inst, &table, &x0()).map(|got| got == table.eval(&hard)),
        );
    }
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let n = rng.gen_range(1..=4usize);
    let gates = rng.gen_range(0..=8usize);
    let mut measures = 0;
    let mut ops = Vec::with_capacity(gates);
    for _ in 0..gates {
        let a = rng.gen_range(0..n);
        let b = if n > 1 { (a + rng.gen_range(1..n)) % n } else { a };
        let kind = rng.gen_range(0..if n > 1 { 9 } else { 7 });
        let op = match kind {
            0 | 1 => Op::Gate(Gate::H(a)),
            2 => Op::Gate(Gate::X(a)),
            3 => Op::Gate(Gate::Y(a)),
            4 => Op::Gate(Gate::S(a)),
            5 => Op::Gate(Gate::T(a)),
            6 if measures < 2 => {
                measures += 1;
                Op::Measure(a)
            }
            6 => Op::Gate(Gate::Z(a)),
            7 => Op::Gate(Gate::Cnot(a, b)),
            _ => Op::Gate(Gate::Cz(a, b)),
        };
        ops.push(op);
    }
    let accept = vec![(rng.gen_range(0..n), rng.gen())];
    Circuit::new(n, ops, accept).expect("generated circuits are well-formed")
}

fn quantum_path_pairs(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..500 {
        let c = random_circuit(rng);
        let input = BitString::from_u64(rng.gen_range(0..1 << c.n_qubits()), c.n_qubits());
        let outcome = pathsum_parts(&c, &input).and_then(|(re, im)| {
            Ok(re == statevector_accept(&c, &input)? && im.is_zero())
        });
        t.check(|| format!("circuit #{i}:\n{c}"), outcome);
        if i < 200 {
            let deferred = defer_measurements(&c);
            let outcome = pathsum_parts(&c, &input).and_then(|(re, _)| {
                let padded = input.concat(&BitString::zeros(deferred.n_qubits() - c.n_qubits()));
                Ok(re == pathsum_parts(&deferred, &padded)?.0 && re == statevector_accept(&deferred, &padded)?)
            });
            t.check(|| format!("deferred circuit #{i}:\n{c}"), outcome);
        }
    }
}

/// `Σ_a Π_i φ_i(a)` by nested loops that index the tables directly.
fn brute_partition(cards: &[usize], factors: &[(Vec<usize>, Vec<BigRational>)]) -> BigRational {
    let total: usize = cards.iter().product();
    let mut z = BigRational::zero();
    for code in 0..total {
        let mut a = vec![0; cards.len()];
        let mut rest = code;
        for (v, &c) in cards.iter().enumerate().rev() {
            a[v] = rest % c;
            rest /= c;
        }
        let mut term = BigRational::one();
        for (scope, table) in factors {
            let row = scope.iter().fold(0, |r, &v| r * cards[v] + a[v]);
            term *= &table[row];
        }
        z += term;
    }
    z
}

fn random_pgm(rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<(Vec<usize>, Vec<BigRational>)>) {
    let n = rng.gen_range(1..=6usize);
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut factors = Vec::new();
    let mut vars: Vec<usize> = (0..n).collect();
    vars.shuffle(rng);
    // a factor per variable guarantees coverage; extras overlap at random
    let extra = rng.gen_range(0..=2);
    for f in 0..n + extra {
        let size = rng.gen_range(1..=3.min(n));
        let mut scope: Vec<usize> = (0..n).collect();
        scope.shuffle(rng);
        scope.truncate(size);
        if f < n && !scope.contains(&vars[f]) {
            scope[0] = vars[f];
        }
        let len: usize = scope.iter().map(|&v| cards[v]).product();
        let table = (0..len)
            .map(|_| if rng.gen_ratio(1, 6) { BigRational::zero() } else { rat(rng.gen_range(1..=9), rng.gen_range(1..=4)) })
            .collect();
        factors.push((scope, table));
    }
    (cards, factors)
}

fn build_pgm(cards: &[usize], factors: &[(Vec<usize>, Vec<BigRational>)]) -> Result<Pgm> {
    Pgm::new(cards.to_vec(), factors.iter().map(|(s, t)| Factor::new(s.clone(), t.clone())).collect())
}

/// A Bayesian network over `n` variables with random parents among lower
/// indices and random normalized conditional tables.
fn random_bn(rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<(Vec<usize>, Vec<BigRational>)>) {
    let n = rng.gen_range(1..=5usize);
    let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let factors = (0..n)
        .map(|i| {
            let mut scope: Vec<usize> = (0..i).filter(|_| rng.gen_ratio(1, 2)).take(2).collect();
            scope.push(i);
            let parents: usize = scope[..scope.len() - 1].iter().map(|&v| cards[v]).product();
            let mut table = Vec::new();
            for _ in 0..parents {
                let raw: Vec<i64> = (0..cards[i]).map(|_| rng.gen_range(0..=5)).collect();
                let total: i64 = raw.iter().sum();
                if total == 0 {
                    table.extend((0..cards[i]).map(|j| int((j == 0) as i64)));
                } else {
                    table.extend(raw.iter().map(|&r| rat(r, total)));
                }
            }
            (scope, table)
        })
        .collect();
    (cards, factors)
}

fn random_assignment(rng: &mut ChaCha8Rng, cards: &[usize], max: usize) -> Vec<(usize, usize)> {
    let mut vars: Vec<usize> = (0..cards.len()).collect();
    vars.shuffle(rng);
    vars.truncate(rng.gen_range(0..=max.min(cards.len())));
    vars.into_iter().map(|v| (v, rng.gen_range(0..cards[v]))).collect()
}

fn random_formula(rng: &mut ChaCha8Rng, vars: usize, connectives: usize) -> pgm::Formula {
    use pgm::Formula;
    if connectives == 0 {
        return Formula::var(rng.gen_range(1..=vars));
    }
    match rng.gen_range(0..3) {
        0 => Formula::not(random_formula(rng, vars, connectives - 1)),
        k => {
            let left = rng.gen_range(0..connectives);
            let (a, b) = (random_formula(rng, vars, left), random_formula(rng, vars, connectives - 1 - left));
            if k == 1 { Formula::and(a, b) } else { Formula::or(a, b) }
        }
    }
}

fn pgm_stack(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..300 {
        let (cards, factors) = random_pgm(rng);
        let want = brute_partition(&cards, &factors);
        t.check(
            || format!("partition function #{i}"),
            build_pgm(&cards, &factors).and_then(|m| Ok(pgm::partition_function(&m)? == want)),
        );
    }
    let mut queries = 0;
    let mut bn_index = 0;
    while queries < 200 {
        bn_index += 1;
        let (cards, factors) = random_bn(rng);
        let model = match build_pgm(&cards, &factors) {
            Ok(m) => m,
            Err(e) => {
                t.check(|| format!("bn #{bn_index}"), Err(e));
                continue;
            }
        };
        t.check(
            || format!("bn #{bn_index} normalization"),
            Ok(pgm::is_bayesian_network(&model) && brute_partition(&cards, &factors).is_one()),
        );
        for _ in 0..4 {
            let target = random_assignment(rng, &cards, 2);
            let evidence = random_assignment(rng, &cards, 2);
            let mut query = Query { target, evidence, threshold: BigRational::zero() };
            let p = match pgm::conditional_probability(&model, &query) {
                Ok(p) => p,
                Err(crate::Error::ZeroEvidence) => continue,
                Err(e) => {
                    t.check(|| format!("query on bn #{bn_index}"), Err(e));
                    continue;
                }
            };
            query.threshold = match rng.gen_range(0..3) {
                0 => p.clone(),
                1 => rat(rng.gen_range(0..=12), 12),
                _ => &p + rat(rng.gen_range(-1..=1), 360),
            };
            let want = p > query.threshold;
            t.check(
                || format!("conditional decision {query:?} on bn #{bn_index}"),
                pgm::conditional_decide(&model, &query).map(|got| got == want),
            );
            queries += 1;
        }
    }
    for i in 0..100 {
        let vars = rng.gen_range(1..=10usize);
        let connectives = rng.gen_range(0..=6);
        let f = random_formula(rng, vars, connectives);
        let n = f.num_vars() as u32;
        let want = rat(pgm::sat_count(&f) as i64, 1i64 << n);
        t.check(
            || format!("majsat #{i}: {f}"),
            pgm::majsat_to_pgm(&f).and_then(|m| Ok(pgm::partition_function(&m)? == want)),
        );
    }
}

fn prime_reciprocals(_rng: &mut ChaCha8Rng, t: &mut Tally) {
    let oracle = prime_reciprocal_oracle();
    t.check(
        || "f(10) = 247/210".into(),
        exact_sum(&oracle, &encode_natural(10)).map(|f| f == rat(247, 210)),
    );
    for x in 1..=50u64 {
        let outcome = exact_sum(&oracle, &encode_natural(x)).map(|f| *f.denom() == BigInt::from(primorial(x)));
        t.check(|| format!("denominator at x = {x}"), outcome);
    }
    t.check(|| "prime gap bound on [17, 10000]".into(), prime_gap_check(10_000));
}

fn closed_form(items: &[Item], x: &BitString) -> BigRational {
    items.iter().zip(x.bits()).map(|(i, &s)| if s { i.cost.clone() } else { &i.prob * &i.penalty }).sum()
}

fn stochastic_stack(rng: &mut ChaCha8Rng, t: &mut Tally) {
    for i in 0..300 {
        // most instances stay small; every twentieth has up to 9 items
        let m = if i % 20 == 0 { rng.gen_range(7..=9) } else { rng.gen_range(1..=5) };
        let items: Vec<Item> = (0..m)
            .map(|_| Item {
                cost: rat(rng.gen_range(0..=20), rng.gen_range(1..=4)),
                penalty: rat(rng.gen_range(0..=40), rng.gen_range(1..=3)),
                prob: rat(rng.gen_range(0..=8), 8),
            })
            .collect();
        let problem = match TwoStageProblem::preselection(items.clone()) {
            Ok(p) => p,
            Err(e) => {
                t.check(|| format!("instance #{i}"), Err(e));
                continue;
            }
        };
        let x = BitString::from_u64(rng.gen_range(0..1 << m), m);
        t.check(
            || format!("expected cost #{i} at {x}"),
            expected_cost(&problem, &x).map(|c| c == closed_form(&items, &x)),
        );
        let mut best: Option<(BitString, BigRational)> = None;
        for x in BitString::all(m) {
            let c = closed_form(&items, &x);
            if best.as_ref().map_or(true, |(_, b)| c < *b) {
                best = Some((x, c));
            }
        }
        let best = best.expect("nonempty");
        t.check(|| format!("best solution #{i}"), best_solution(&problem).map(|got| got == best));
    }
}

fn halting(_rng: &mut ChaCha8Rng, t: &mut Tally) {
    let bits = |s: &str| s.parse::<BitString>().expect("literal bitstring");
    // (machine, input, steps): walking machines halt after t steps, the
    // scanner after |y| + 1, the seeker one step past its first 1
    let halting: Vec<(ToyMachine, BitString, u32)> = vec![
        (ToyMachine::halting_after(0), x0(), 0),
        (ToyMachine::halting_after(1), x0(), 1),
        (ToyMachine::halting_after(3), bits("101"), 3),
        (ToyMachine::halting_after(6), x0(), 6),
        (ToyMachine::halting_after(12), x0(), 12),
        (ToyMachine::scan_to_blank(), x0(), 1),
        (ToyMachine::scan_to_blank(), bits("0110"), 5),
        (ToyMachine::scan_to_blank(), bits("1111111"), 8),
        (ToyMachine::seek_one(), bits("1"), 1),
        (ToyMachine::seek_one(), bits("00001"), 5),
    ];
    for (k, (machine, y, steps)) in halting.iter().enumerate() {
        let problem = halting_oracle(machine, y);
        let target = BigRational::new(BigInt::one(), pow2(*steps));
        for b in 1..=24u32 {
            let outcome = approx_sum(&problem, &x0(), b)
                .map(|a| (a.to_rational() - &target).abs() <= BigRational::new(BigInt::one(), pow2(b)));
            t.check(|| format!("halting machine {k} at b = {b}"), outcome);
        }
    }
    let looping: Vec<(ToyMachine, BitString)> = vec![
        (ToyMachine::looping(), x0()),
        (ToyMachine::looping(), bits("1010")),
        (ToyMachine::seek_one(), x0()),
        (ToyMachine::seek_one(), bits("000")),
        (
            ToyMachine::parse("states 2 start 0 halt 1\n0 0 -> 1 S 0\n0 1 -> 0 S 0\n0 _ -> 0 R 0\n").expect("literal machine"),
            bits("01"),
        ),
    ];
    for (k, (machine, y)) in looping.iter().enumerate() {
        let problem = halting_oracle(machine, y);
        for b in 1..=24u32 {
            t.check(|| format!("looping machine {k} at b = {b}"), approx_sum(&problem, &x0(), b).map(|a| a.to_rational().is_zero()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_deterministic() {
        let a = run_check(2, 7);
        let b = run_check(2, 7);
        assert!(a.passed(), "{a}");
        assert_eq!((a.cases, a.failures.len()), (b.cases, b.failures.len()));
    }

    #[test]
    fn brute_partition_matches_two_var() {
        let f = vec![(vec![0], vec![rat(1, 1), rat(1, 1)]), (vec![0, 1], vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 1)])];
        assert_eq!(brute_partition(&[2, 2], &f), rat(2, 1));
    }
}
