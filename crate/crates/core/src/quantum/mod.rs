// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Clifford+T circuits with exact acceptance probabilities, computed by
//! state-vector simulation and by the path-pair weighted sum.

pub mod circuit;
pub mod pathsum;
pub mod ring;
pub mod statevector;

pub use circuit::{defer_measurements, Circuit, Gate, Op};
pub use pathsum::{pathsum_accept, pathsum_parts, weight_oracle_from_circuit};
pub use ring::{RingAmplitude, ZSqrt2};
pub use statevector::statevector_accept;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::arith::{pow2, rat};
use crate::bits::BitString;
use crate::counting::{approx_sum, exact_sum_quadratic};
use crate::error::{Error, Result};
use crate::oracle::WeightedCountingProblem;
use crate::quadratic::QSqrt2;

/// Whether `g(x) ∈ [1−c, 1]` on every sample labeled in and `g(x) ∈ [0, c]`
/// on every sample labeled out.
///
/// Exact (in `ℚ(√2)`) when the oracle has an exact map; otherwise `g` is
/// approximated with error `e < (1/2 − c)/2` and each interval is widened by `e`.
pub fn awpp_gap_check(
    problem: &WeightedCountingProblem,
    samples: &[(BitString, bool)],
    c: &BigRational,
) -> Result<bool> {
    let half = rat(1, 2);
    if *c >= half {
        return Err(Error::Precondition(format!("c = {c} must be below 1/2")));
    }
    let one = BigRational::one();
    let exact = problem.oracle().has_exact_quadratic();
    // 2^-b < (1/2 - c)/2
    let margin = (&half - c) / BigRational::from_integer(2.into());
    let b = (0u32..).find(|&b| BigRational::new(BigInt::one(), pow2(b)) < margin).expect("finite");
    let slack = BigRational::new(BigInt::one(), pow2(b));
    for (x, member) in samples {
        let (lo, hi) = if *member { (&one - c, one.clone()) } else { (BigRational::from_integer(0.into()), c.clone()) };
        let ok = if exact {
            let g = exact_sum_quadratic(problem, x)?;
            g >= QSqrt2::from(lo) && g <= QSqrt2::from(hi)
        } else {
            let g = approx_sum(problem, x, b)?.to_rational();
            g >= lo - &slack && g <= hi + &slack
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bounded-error acceptance: approximates the path-pair sum to within 1/8
/// and compares against 1/2. Under the promise (`≥ 2/3` or `≤ 1/3`) the
/// approximation lands outside `(11/24, 13/24)`.
pub fn bqp_decide(circuit: &Circuit, input: &BitString) -> Result<bool> {
    let problem = weight_oracle_from_circuit(circuit, input)?;
    let v = approx_sum(&problem, &BitString::new(), 3)?.to_rational();
    if v > rat(11, 24) && v < rat(13, 24) {
        return Err(Error::PromiseViolated(format!(
            "acceptance estimate {v} lies inside the gap (11/24, 13/24)"
        )));
    }
    Ok(v >= rat(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::IntPolynomial;

    fn c(text: &str) -> Circuit {
        text.parse().unwrap()
    }

    #[test]
    fn bqp_examples() {
        let x = BitString::new();
        assert!(bqp_decide(&c("WCQC\n1\nX 0\nACCEPT 0=1\n"), &x).unwrap());
        assert!(!bqp_decide(&c("WCQC\n1\nACCEPT 0=1\n"), &x).unwrap());
        let three_quarters = or_of_two_coins();
        assert_eq!(statevector_accept(&three_quarters, &x).unwrap(), QSqrt2::from(rat(3, 4)));
        assert!(bqp_decide(&three_quarters, &x).unwrap());
        assert!(matches!(
            bqp_decide(&c("WCQC\n1\nH 0\nACCEPT 0=1\n"), &x),
            Err(Error::PromiseViolated(_))
        ));
    }

    #[test]
    fn awpp_examples() {
        let x = BitString::new();
        let one = WeightedCountingProblem::constant(IntPolynomial::constant(0), rat(1, 1));
        assert!(awpp_gap_check(&one, &[(x.clone(), true), (BitString::zeros(3), true)], &rat(1, 3)).unwrap());
        let half = WeightedCountingProblem::value(rat(1, 2));
        assert!(!awpp_gap_check(&half, &[(x.clone(), true)], &rat(1, 3)).unwrap());
        assert!(!awpp_gap_check(&half, &[(x.clone(), false)], &rat(1, 3)).unwrap());
        assert!(awpp_gap_check(&half, &[], &rat(1, 2)).is_err());
    }

    /// Qubit 2 becomes `q0 ∨ q1` after two Hadamard coins, via a
    /// Clifford+T Toffoli on the negated inputs (`T† = Z S T`).
    fn or_of_two_coins() -> Circuit {
        let tdg = |q: usize| format!("Z {q}\nS {q}\nT {q}\n");
        let text = format!(
            "WCQC\n3\nH 0\nH 1\nX 0\nX 1\n\
             H 2\nCNOT 1 2\n{}CNOT 0 2\nT 2\nCNOT 1 2\n{}CNOT 0 2\nT 1\nT 2\nH 2\n\
             CNOT 0 1\nT 0\n{}CNOT 0 1\nX 2\nACCEPT 2=1\n",
            tdg(2),
            tdg(2),
            tdg(1)
        );
        c(&text)
    }

    #[test]
    fn awpp_on_circuit() {
        let x = BitString::new();
        let oracle = weight_oracle_from_circuit(&or_of_two_coins(), &x).unwrap();
        assert!(awpp_gap_check(&oracle, &[(x.clone(), true)], &rat(1, 3)).unwrap());
        assert!(!awpp_gap_check(&oracle, &[(x.clone(), true)], &rat(1, 5)).unwrap());
        assert!(!awpp_gap_check(&oracle, &[(x, false)], &rat(1, 3)).unwrap());
    }
}
