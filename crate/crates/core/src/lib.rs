//! Streaming algorithms for maximizing a submodular set function under a
//! cardinality constraint using a linear number of value-oracle queries,
//! together with classic baselines and an experiment harness.
//!
//! Algorithms take an [`Oracle`] and a stream of element ids and return a
//! [`Solution`]: the chosen set plus the resource [`Metrics`] of the run.

// `!(x >= y)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod buffer;
pub mod cli;
pub mod error;
pub mod harness;
pub mod monotone;
pub mod multipass;
pub mod nonmonotone;
pub mod oracle;
pub mod rng;
pub mod solution;
pub mod trace;

pub use error::{Error, Result};
pub use oracle::{ObjectiveKind, Oracle, ValueOracle};
pub use solution::{Metrics, Solution};
