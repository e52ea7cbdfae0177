//! Robust estimation of the mean of random matrices with heavy tails.
//!
//! Observations are passed through a logarithmic influence function `ψ`,
//! lifted to symmetric matrices spectrally, which yields estimators whose
//! operator-norm error has sub-Gaussian deviations under a second-moment
//! assumption only. On top of the basic truncated mean the crate provides
//! Lepski-type adaptation to the unknown variance, fixed-point and two-step
//! refinements, covariance estimation, low-rank matrix completion, and the
//! data generators and experiment driver used to compare them.

// Negated comparisons are how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod datagen;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod influence;
pub mod io;
pub mod linalg;
pub mod location;

pub use error::{Error, LastIterate, Result};
pub use influence::InfluenceKind;
pub use linalg::{MatrixNorms, RectMatrix, SymMatrix};
