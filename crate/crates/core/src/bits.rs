// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Bitstrings used for problem inputs `x` and paths `u`.
//!
//! `#u` always reads a bitstring as a big-endian natural number.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        debug_assert!(len >= 64 || value >> len == 0, "{value} does not fit in {len} bits");
        BitString(
            (0..len)
                .rev()
                .map(|i| i < 64 && (value >> i) & 1 == 1)
                .collect(),
        )
    }

    /// Shortest big-endian encoding of `n` (the empty string for 0).
    pub fn from_natural(n: &BigUint) -> Self {
        let len = n.bits() as usize;
        BitString((0..len).rev().map(|i| n.bit(i as u64)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![false; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn is_all_zero(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// `#u`, panicking if the string is longer than 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.0.len() <= 64, "bitstring too long for u64");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn to_natural(&self) -> BigUint {
        let mut n = BigUint::zero();
        for &b in &self.0 {
            n <<= 1u32;
            if b {
                n += 1u32;
            }
        }
        n
    }

    pub fn slice(&self, start: usize, end: usize) -> BitString {
        BitString(self.0[start..end].to_vec())
    }

    /// Splits off the first `at` bits.
    pub fn split_at(&self, at: usize) -> (BitString, BitString) {
        let (a, b) = self.0.split_at(at);
        (BitString(a.to_vec()), BitString(b.to_vec()))
    }

    /// `⟨self, other⟩`: plain concatenation.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut bits = self.0.clone();
        bits.extend_from_slice(&other.0);
        BitString(bits)
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// All strings of length `len` in lexicographic (= numeric) order.
    pub fn all(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64);
        (0..1u64 << len).map(move |v| BitString::from_u64(v, len))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::parse(1, format!("invalid bit '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

/// Number of bits in the binary representation of `n` (0 for 0).
pub fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}
