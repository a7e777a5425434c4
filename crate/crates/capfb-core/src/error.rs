//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors produced by validation and by the iterative solvers.
#[derive(Debug, Clone, Error)]
pub enum CoreError {
    /// Invalid input data (out-of-range symbol, bad dimensions, non-stochastic row, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense enumeration would exceed the configured entry cap.
    #[error("resource limit exceeded: construction needs {needed} entries, cap is {cap}")]
    Resource { needed: u128, cap: u64 },

    /// An iterative solver ran out of iterations.
    #[error("{what} did not converge within {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },

    /// The per-stage concave maximizer ran out of iterations. Carries the best
    /// iterate and its optimality bracket so callers can inspect how close it got.
    #[error("stage maximizer did not converge within {iterations} iterations (bracket {bracket:.3e})")]
    StageNonConvergence {
        iterations: usize,
        bracket: f64,
        best_policy: Vec<f64>,
        best_value: f64,
    },

    /// The output chain induced by a policy fails the ergodicity diagnostic.
    #[error("induced output chain is not ergodic: {0}")]
    NotErgodic(String),

    /// A requested closed form does not apply to the given parameters.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
