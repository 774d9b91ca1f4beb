//! Tseng's alternating minimization algorithm (AMA) and its proximal variant
//! for two-block separable convex programs, with total-variation deblurring
//! and kernel SVM drivers.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linop;
pub mod prox;
pub mod solver;
pub mod vecops;

pub use error::{Error, Result};
pub mod oracle;
pub mod problems;
