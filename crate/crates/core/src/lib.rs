//! Smoothed Levenberg-Marquardt solver for optimistic bilevel programs in
//! value-function form, with a problem library, evaluation metrics, and the
//! penalty-parameter studies.

// Negated comparisons double as NaN rejection in parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod format;
pub mod jacobian;
pub mod library;
pub mod metrics;
pub mod problem;
pub mod residual;
pub mod solver;
pub mod studies;

pub use error::{Error, Result};
