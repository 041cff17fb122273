//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Result`]. Variants are grouped by
//! how the command-line driver maps them to process exit codes: configuration
//! and validation problems, numerical non-convergence, and privacy
//! verification failures are distinguished because callers react to them
//! differently.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments to a library call (bad dimension, empty input,
    /// non-finite number, out-of-range parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A formula was evaluated outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Experiment configuration rejected before any run started.
    #[error("config error: {0}")]
    Config(String),

    /// An iterative solver hit its iteration cap before reaching tolerance.
    #[error(
        "solver did not converge: residual {residual:.3e} after {iterations} iterations (tol {tol:.3e})"
    )]
    NonConverged {
        residual: f64,
        iterations: usize,
        tol: f64,
    },

    /// A noise plan failed (or was never given) accountant verification.
    #[error("privacy verification failed: {0}")]
    PrivacyVerification(String),

    /// Two datasets that must differ in at most one index do not.
    #[error("datasets are not adjacent: {0}")]
    NotAdjacent(String),

    /// Instance generation failed (inconsistent matrices, degenerate data).
    #[error("instance generator error: {0}")]
    Generator(String),

    /// An estimator that averages over replicates received too few.
    #[error("insufficient replicates: need at least {needed}, got {got}")]
    InsufficientReplicates { needed: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
