// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end flows across modules through the public API.

use num_rational::BigRational;
use num_traits::Zero;

use wcount::arith::rat;
use wcount::closure::{finite_combine, scale, CombineKind};
use wcount::counting::{approx_sum, exact_sum};
use wcount::decide::{decide_threshold, DecisionInstance};
use wcount::pgm::{clear_denominators, majsat_to_pgm, partition_function, Formula, Pgm};
use wcount::quantum::{awpp_gap_check, weight_oracle_from_circuit, Circuit};
use wcount::recover::solve_bounded_output;
use wcount::reductions::{apply_reduction, lift_nat_to_binary, AffineReduction};
use wcount::{BitString, IntPolynomial, RangeTag};

fn x() -> BitString {
    BitString::new()
}

/// A PGM with rational tables becomes a natural-weight problem after clearing
/// denominators, then a {0,1} problem; the chain of affine maps gives back Z.
#[test]
fn pgm_to_binary_counting() {
    let model: Pgm = "WCPGM\n2\n2 2\n2\n1 0\n1/3 2/3\n2 0 1\n1/2 1/2 1/4 3/4\n".parse().unwrap();
    let z = partition_function(&model).unwrap();
    assert_eq!(z, rat(1, 1));
    let (integral, factor) = clear_denominators(&model).unwrap();
    let nat = integral.counting_problem();
    assert_eq!(nat.tag(), RangeTag::Nat);
    let binary = lift_nat_to_binary(&nat, &IntPolynomial::constant(10)).unwrap();
    let count = exact_sum(&binary, &x()).unwrap();
    let red = AffineReduction::constant(factor, BigRational::zero());
    assert_eq!(apply_reduction(&red, &count, &x()), z);
}

/// MAJSAT through the PGM encoding, decided as a threshold question.
#[test]
fn majority_satisfiability_as_threshold() {
    let f: Formula = "(x1 | x2) & (x2 | x3)".parse().unwrap();
    let z = majsat_to_pgm(&f).unwrap().counting_problem();
    assert_eq!(exact_sum(&z, &x()).unwrap(), rat(5, 8));
    let bound = IntPolynomial::constant(8);
    assert!(decide_threshold(&DecisionInstance::new(z.clone(), rat(1, 2), bound.clone()), &x()).unwrap());
    assert!(!decide_threshold(&DecisionInstance::new(z, rat(3, 4), bound), &x()).unwrap());
}

/// Closure results are recovered exactly from a single approximation.
#[test]
fn closure_then_recovery() {
    let third = wcount::WeightedCountingProblem::constant(IntPolynomial::constant(1), rat(1, 6));
    let fifth = wcount::WeightedCountingProblem::constant(IntPolynomial::constant(2), rat(1, 20));
    let sum = finite_combine(CombineKind::Sum, &[third.clone(), fifth.clone()]).unwrap();
    let prod = finite_combine(CombineKind::Product, &[third, scale(&fifth, &rat(-3, 1))]).unwrap();
    let q = IntPolynomial::constant(12);
    assert_eq!(solve_bounded_output(&sum, &x(), &q).unwrap(), rat(8, 15));
    assert_eq!(solve_bounded_output(&prod, &x(), &q).unwrap(), rat(-1, 5));
    let a = approx_sum(&prod, &x(), 10).unwrap().to_rational();
    assert!((a - rat(-1, 5)) * rat(1024, 1) <= rat(1, 1));
}

/// A circuit's path-pair oracle satisfies the bounded-error gap conditions.
#[test]
fn circuit_gap() {
    let coin: Circuit = "WCQC\n2\nH 0\nCNOT 0 1\nACCEPT 1=0\n".parse().unwrap();
    let oracle = weight_oracle_from_circuit(&coin, &x()).unwrap();
    assert!(!awpp_gap_check(&oracle, &[(x(), true)], &rat(1, 3)).unwrap());
    let sure: Circuit = "WCQC\n1\nH 0\nH 0\nACCEPT 0=0\n".parse().unwrap();
    let oracle = weight_oracle_from_circuit(&sure, &x()).unwrap();
    assert!(awpp_gap_check(&oracle, &[(x(), true)], &rat(1, 3)).unwrap());
}
