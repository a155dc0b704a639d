// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use crate::oracle::RangeTag;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("oracle has no exact weight map")]
    ExactUnavailable,
    #[error("path space of {needed} bits exceeds the enumeration cap of {cap} bits")]
    CapExceeded { needed: u64, cap: u32 },
    #[error("decision instance has no output bit bound")]
    MissingBound,
    #[error("no rational of at most {bits} bits in [{lo}, {hi}]")]
    NoUniqueRational { lo: String, hi: String, bits: u64 },
    #[error("weight {weight} violates the bit bound 2^{bits}")]
    BoundViolated { weight: String, bits: u64 },
    #[error("empty list of problems")]
    EmptyList,
    #[error("promise violated: {0}")]
    PromiseViolated(String),
    #[error("value {value} outside the domain [-{c}, {c}]")]
    DomainViolation { value: String, c: String },
    #[error("expected a {expected} oracle, found {found}")]
    TagMismatch { expected: RangeTag, found: RangeTag },
    #[error("no magnitude bound available for a product operand")]
    MissingMagnitudeBound,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("evidence has probability zero")]
    ZeroEvidence,
    #[error("malformed formula: {0}")]
    MalformedFormula(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl fmt::Display) -> Self {
        Error::Parse {
            line,
            msg: msg.to_string(),
        }
    }
}
