//! Estimation of hidden dynamic structure from noisy bandit feedback.
//!
//! A learner pulls one arm per time step and sees a single scalar
//! `f^t(theta)^T x + noise`. From that stream alone, this crate estimates
//!
//! * an aliquot nearly period of the hidden trajectory (`period`), via
//!   exponential-sum detection over stride subsequences, and
//! * the unit-circle eigenvalues of a hidden linear map (`eigen`), via
//!   quadratic-phase (Weyl-type) reward averages and a truncated
//!   pseudo-inverse.
//!
//! Self-contained environments (`envs`) — a bounded Life board, a
//! nearly periodic circle system, and arbitrary linear systems — make the
//! reference experiments reproducible end to end (`harness`). Start with the
//! runnable programs in `examples/`.

// validations are written `!(x > 0.0)` on purpose: the negation rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod envs;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod numerics;
pub mod period;
pub mod properties;

pub use error::{Error, Result};
