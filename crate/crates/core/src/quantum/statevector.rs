// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense state-vector simulation over exact amplitudes.

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::quadratic::QSqrt2;

use super::circuit::{Circuit, Op};
use super::ring::RingAmplitude;

pub const MAX_STATEVECTOR_QUBITS: usize = 10;

type State = Vec<RingAmplitude>;

fn apply(state: &mut State, qubits: &[usize], matrix: &[Vec<RingAmplitude>]) {
    let g = qubits.len();
    let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
    // index of sub-basis element `j` (first qubit = high bit of j) within `base`
    let at = |base: usize, j: usize| {
        qubits.iter().enumerate().fold(base, |s, (pos, q)| {
            if j >> (g - 1 - pos) & 1 == 1 { s | 1 << q } else { s }
        })
    };
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        let old: Vec<RingAmplitude> = (0..1 << g).map(|j| state[at(base, j)].clone()).collect();
        for (row, coeffs) in matrix.iter().enumerate() {
            let v = coeffs
                .iter()
                .zip(&old)
                .filter(|(c, a)| !c.is_zero() && !a.is_zero())
                .fold(RingAmplitude::zero(), |acc, (c, a)| &acc + &(c * a));
            state[at(base, row)] = v;
        }
    }
}

/// Exact acceptance probability. Intermediate measurements split the state
/// into unnormalized branches, one per outcome.
pub fn statevector_accept(circuit: &Circuit, input: &BitString) -> Result<QSqrt2> {
    let n = circuit.n_qubits();
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(Error::CapExceeded {
            needed: n as u64,
            cap: MAX_STATEVECTOR_QUBITS as u32,
        });
    }
    let mut init = vec![RingAmplitude::zero(); 1 << n];
    init[circuit.initial_state(input)? as usize] = RingAmplitude::one();
    let mut branches = vec![init];
    for op in circuit.ops() {
        match op {
            Op::Gate(g) => {
                let m = g.matrix();
                for s in &mut branches {
                    apply(s, &g.qubits(), &m);
                }
            }
            Op::Measure(q) => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for s in branches {
                    for outcome in [0usize, 1] {
                        let proj: State = s
                            .iter()
                            .enumerate()
                            .map(|(i, a)| if i >> q & 1 == outcome { a.clone() } else { RingAmplitude::zero() })
                            .collect();
                        if proj.iter().any(|a| !a.is_zero()) {
                            next.push(proj);
                        }
                    }
                }
                branches = next;
            }
        }
    }
    Ok(branches
        .iter()
        .flat_map(|s| s.iter().enumerate())
        .filter(|(i, _)| circuit.accepts(*i as u64))
        .map(|(_, a)| a.norm_sqr())
        .sum())
}
