//! Differentially private gradient descent ascent for strongly-convex–
//! strongly-concave minimax problems, with noise calibration via a moments
//! accountant, measured algorithmic stability, four generalization-risk
//! estimators, and pure evaluators for the matching closed-form
//! high-probability bounds.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod optimizer;
pub mod privacy;
pub mod problem;
pub mod risk;
pub mod stability;

pub use error::{Error, Result};
