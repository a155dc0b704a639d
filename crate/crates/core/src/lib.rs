// Copyright 2026 The wcount Authors
// SPDX-License-Identifier: Apache-2.0

//! Weighted counting over arbitrary weight oracles.

pub mod arith;
pub mod bits;
pub mod closure;
pub mod counting;
pub mod decide;
pub mod error;
pub mod halting;
pub mod newman;
pub mod oracle;
pub mod pgm;
pub mod poly;
pub mod primes;
pub mod quantum;
pub mod quadratic;
pub mod recover;
pub mod reductions;
pub mod stochastic;
pub mod suite;

pub use bits::BitString;
pub use error::{Error, Result};
pub use oracle::{RangeTag, WeightOracle, WeightedCountingProblem};
pub use poly::IntPolynomial;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/reductions.md")]
    mod reductions {}
    #[doc = include_str!("../../../book/src/closure.md")]
    mod closure {}
    #[doc = include_str!("../../../book/src/decisions.md")]
    mod decisions {}
    #[doc = include_str!("../../../book/src/newman.md")]
    mod newman {}
    #[doc = include_str!("../../../book/src/quantum.md")]
    mod quantum {}
    #[doc = include_str!("../../../book/src/pgm.md")]
    mod pgm {}
    #[doc = include_str!("../../../book/src/stochastic.md")]
    mod stochastic {}
    #[doc = include_str!("../../../book/src/case-studies.md")]
    mod case_studies {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
