//! Simulation of two-party protocols that estimate `E_{x~p, y~q}[f(x, y)]`
//! when Alice holds `p`, Bob holds `q` and both know `f`.
//!
//! Every protocol returns an [`EstimateReport`] carrying the estimate and a
//! [`CostLedger`] with the exact number of bits each party sent.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diag;
pub mod error;
pub mod generic;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod par;
pub mod specific;

pub use error::{Error, Result};
pub use model::*;
