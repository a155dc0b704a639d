// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Acceptance probability as a sum over compatible path pairs,
//! `Σ_{p1 ∼ p2} Re(a_{p1} · conj(a_{p2}))`.
//!
//! Only Hadamard gates branch, so a path is fixed by one choice bit per
//! Hadamard: `2^h` paths, `2^{2h}` pairs.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::oracle::{RangeTag, WeightOracle, WeightedCountingProblem};
use crate::poly::IntPolynomial;
use crate::quadratic::QSqrt2;

use super::circuit::{Circuit, Gate, Op};
use super::ring::RingAmplitude;

/// At most 12 Hadamards: `2^24` path pairs.
pub const MAX_HADAMARDS: usize = 12;

/// Endpoint of one computational path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEnd {
    pub state: u64,
    pub record: Vec<bool>,
    pub amplitude: RingAmplitude,
}

/// Follows the path selected by `choices` (the new value of the target qubit
/// at each Hadamard, in order).
pub fn trace(circuit: &Circuit, init: u64, choices: &[bool]) -> PathEnd {
    let mut state = init;
    let mut amp = RingAmplitude::one();
    let mut record = Vec::new();
    let mut next_choice = choices.iter();
    let bit = |s: u64, q: usize| s >> q & 1 == 1;
    for op in circuit.ops() {
        match *op {
            Op::Gate(Gate::H(q)) => {
                let new = *next_choice.next().expect("one choice per Hadamard");
                amp = &amp * &RingAmplitude::inv_sqrt2();
                if bit(state, q) && new {
                    amp = -amp;
                }
                state = (state & !(1 << q)) | (new as u64) << q;
            }
            Op::Gate(Gate::X(q)) => state ^= 1 << q,
            Op::Gate(Gate::Y(q)) => {
                let f = if bit(state, q) { -RingAmplitude::i() } else { RingAmplitude::i() };
                amp = &amp * &f;
                state ^= 1 << q;
            }
            Op::Gate(Gate::Z(q)) => {
                if bit(state, q) {
                    amp = -amp;
                }
            }
            Op::Gate(Gate::S(q)) => {
                if bit(state, q) {
                    amp = &amp * &RingAmplitude::i();
                }
            }
            Op::Gate(Gate::T(q)) => {
                if bit(state, q) {
                    amp = &amp * &RingAmplitude::omega();
                }
            }
            Op::Gate(Gate::Cnot(c, t)) => {
                if bit(state, c) {
                    state ^= 1 << t;
                }
            }
            Op::Gate(Gate::Cz(a, b)) => {
                if bit(state, a) && bit(state, b) {
                    amp = -amp;
                }
            }
            Op::Measure(q) => record.push(bit(state, q)),
        }
    }
    PathEnd { state, record, amplitude: amp }
}

fn check_size(circuit: &Circuit) -> Result<usize> {
    let h = circuit.hadamard_count();
    if h > MAX_HADAMARDS {
        return Err(Error::CapExceeded {
            needed: 2 * h as u64,
            cap: 2 * MAX_HADAMARDS as u32,
        });
    }
    Ok(h)
}

/// Real and imaginary parts of the compatible-pair sum.
pub fn pathsum_parts(circuit: &Circuit, input: &BitString) -> Result<(QSqrt2, QSqrt2)> {
    let h = check_size(circuit)?;
    let init = circuit.initial_state(input)?;
    let mut groups: HashMap<(u64, Vec<bool>), Vec<RingAmplitude>> = HashMap::new();
    for choices in BitString::all(h) {
        let end = trace(circuit, init, choices.bits());
        if circuit.accepts(end.state) {
            groups.entry((end.state, end.record)).or_default().push(end.amplitude);
        }
    }
    let (mut re, mut im) = (QSqrt2::zero(), QSqrt2::zero());
    for amps in groups.values() {
        for a1 in amps {
            for a2 in amps {
                let z = a1 * &a2.conj();
                re = &re + &z.re_value();
                im = &im + &z.im_value();
            }
        }
    }
    Ok((re, im))
}

/// Exact acceptance probability from the path-pair sum.
pub fn pathsum_accept(circuit: &Circuit, input: &BitString) -> Result<QSqrt2> {
    Ok(pathsum_parts(circuit, input)?.0)
}

struct CircuitOracle {
    circuit: Circuit,
    init: u64,
    h: usize,
}

impl CircuitOracle {
    fn pair_weight(&self, u: &BitString) -> QSqrt2 {
        let (c1, c2) = u.split_at(self.h);
        let p1 = trace(&self.circuit, self.init, c1.bits());
        let p2 = trace(&self.circuit, self.init, c2.bits());
        if p1.state != p2.state || p1.record != p2.record || !self.circuit.accepts(p1.state) {
            return QSqrt2::zero();
        }
        (&p1.amplitude * &p2.amplitude.conj()).re_value()
    }
}

impl WeightOracle for CircuitOracle {
    fn range_tag(&self) -> RangeTag {
        RangeTag::Real
    }

    fn approx(&self, _x: &BitString, u: &BitString, b: u32) -> Result<BigInt> {
        Ok(self.pair_weight(u).nearest_scaled(b))
    }

    /// Pair weights can be irrational, so there is no rational map in general.
    fn has_exact(&self) -> bool {
        false
    }

    fn exact(&self, _x: &BitString, u: &BitString) -> Result<BigRational> {
        self.pair_weight(u).as_rational().cloned().ok_or(Error::ExactUnavailable)
    }

    fn exact_quadratic(&self, _x: &BitString, u: &BitString) -> Result<QSqrt2> {
        Ok(self.pair_weight(u))
    }

    fn has_exact_quadratic(&self) -> bool {
        true
    }

    fn magnitude_bits(&self, _x: &BitString) -> Option<u32> {
        Some(0)
    }
}

/// The path-pair sum as a weighted counting problem: `u` is two choice
/// strings of `h` bits each. The problem ignores its own input `x`.
pub fn weight_oracle_from_circuit(
    circuit: &Circuit,
    input: &BitString,
) -> Result<WeightedCountingProblem> {
    let h = check_size(circuit)?;
    let oracle = CircuitOracle {
        circuit: circuit.clone(),
        init: circuit.initial_state(input)?,
        h,
    };
    Ok(WeightedCountingProblem::new(IntPolynomial::constant(2 * h as u64), oracle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::counting::{approx_sum, exact_sum_quadratic};
    use crate::quantum::circuit::defer_measurements;
    use crate::quantum::statevector::statevector_accept;
    use proptest::prelude::*;

    fn c(text: &str) -> Circuit {
        text.parse().unwrap()
    }

    fn zero_input() -> BitString {
        BitString::new()
    }

    #[test]
    fn examples() {
        let h = c("WCQC\n1\nH 0\nACCEPT 0=1\n");
        assert_eq!(pathsum_accept(&h, &zero_input()).unwrap(), QSqrt2::from(rat(1, 2)));
        let hh = c("WCQC\n1\nH 0\nH 0\nACCEPT 0=1\n");
        assert_eq!(pathsum_accept(&hh, &zero_input()).unwrap(), QSqrt2::zero());
        let xs = c("WCQC\n2\nX 0\nX 1\nX 0\nACCEPT 1=1\n");
        assert_eq!(pathsum_accept(&xs, &zero_input()).unwrap(), QSqrt2::one());
        let xs0 = xs.with_accept(vec![(0, true)]).unwrap();
        assert_eq!(pathsum_accept(&xs0, &zero_input()).unwrap(), QSqrt2::zero());
    }

    #[test]
    fn hh_pairs_cancel() {
        // four compatible pairs ending in |1⟩: 1/4 − 1/4 − 1/4 + 1/4
        let hh = c("WCQC\n1\nH 0\nH 0\nACCEPT 0=1\n");
        let p = weight_oracle_from_circuit(&hh, &zero_input()).unwrap();
        let ws: Vec<QSqrt2> = BitString::all(4)
            .map(|u| p.oracle().exact_quadratic(&zero_input(), &u).unwrap())
            .filter(|w| !w.is_zero())
            .collect();
        assert_eq!(ws.len(), 4);
        assert_eq!(ws.iter().cloned().sum::<QSqrt2>(), QSqrt2::zero());
    }

    #[test]
    fn oracle_matches() {
        let h = c("WCQC\n1\nH 0\nACCEPT 0=1\n");
        let p = weight_oracle_from_circuit(&h, &zero_input()).unwrap();
        assert_eq!(exact_sum_quadratic(&p, &zero_input()).unwrap(), QSqrt2::from(rat(1, 2)));
        let t = c("WCQC\n2\nH 0\nT 0\nCNOT 0 1\nH 0\nS 1\nH 1\nACCEPT 0=1\n");
        let p = weight_oracle_from_circuit(&t, &zero_input()).unwrap();
        let exact = statevector_accept(&t, &zero_input()).unwrap();
        for b in [1u32, 8, 20] {
            let a = approx_sum(&p, &zero_input(), b).unwrap().to_rational();
            let err = &QSqrt2::from(a) - &exact;
            let bound = QSqrt2::from(BigRational::new(1.into(), crate::arith::pow2(b)));
            assert!(err <= bound && err >= -bound.clone());
        }
        let xs = c("WCQC\n1\nX 0\nACCEPT 0=1\n");
        let p = weight_oracle_from_circuit(&xs, &zero_input()).unwrap();
        assert_eq!(p.path_len(&zero_input()), 0);
        assert_eq!(p.oracle().exact(&zero_input(), &BitString::new()).unwrap(), rat(1, 1));
    }

    fn op_strategy(n: usize) -> impl Strategy<Value = Op> {
        (0usize..9, 0..n, 0..n).prop_map(move |(k, a, b)| {
            let b = if a == b { (b + 1) % n } else { b };
            match k {
                0 => Op::Gate(Gate::H(a)),
                1 => Op::Gate(Gate::X(a)),
                2 => Op::Gate(Gate::Y(a)),
                3 => Op::Gate(Gate::Z(a)),
                4 => Op::Gate(Gate::S(a)),
                5 => Op::Gate(Gate::T(a)),
                6 => Op::Gate(Gate::Cnot(a, b)),
                7 => Op::Gate(Gate::Cz(a, b)),
                _ => Op::Measure(a),
            }
        })
    }

    fn circuit_strategy() -> impl Strategy<Value = Circuit> {
        (2usize..5)
            .prop_flat_map(|n| (Just(n), proptest::collection::vec(op_strategy(n), 0..9), 0..n, any::<bool>()))
            .prop_map(|(n, ops, q, b)| Circuit::new(n, ops, vec![(q, b)]).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn pathsum_equals_statevector(circ in circuit_strategy()) {
            let x = BitString::new();
            let (re, im) = pathsum_parts(&circ, &x).unwrap();
            prop_assert_eq!(&re, &statevector_accept(&circ, &x).unwrap());
            prop_assert!(im.is_zero());
            let deferred = defer_measurements(&circ);
            prop_assert_eq!(&statevector_accept(&deferred, &x).unwrap(), &re);
            let (q, b) = circ.accept()[0];
            let flip = circ.with_accept(vec![(q, !b)]).unwrap();
            prop_assert_eq!(&re + &pathsum_accept(&flip, &x).unwrap(), QSqrt2::one());
        }
    }
}
