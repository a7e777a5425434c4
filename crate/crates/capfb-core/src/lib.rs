//! Feedback capacity of channels with memory.
//!
//! The crate computes the finite-horizon and per-unit-time feedback capacity
//! of channels whose conditional law depends on the last `M` output symbols,
//! with optional average transmission cost constraints whose cost function
//! reads the last `K` outputs. The optimal channel input distribution then
//! conditions only on the last `J = max(M, K)` outputs, which turns the
//! capacity characterization into a dynamic program over `|B|^J` window
//! states.
//!
//! Modules:
//! - [`prob`]: alphabets, simplices, window-state encodings, relative entropy;
//! - [`channel`]: channel kernels, cost tables, Markov input policies;
//! - [`directed`]: exact joint laws, directed information, the variational
//!   functional (the small-instance ground truth);
//! - [`dp`]: per-stage maximization, backward DP, relative value iteration,
//!   Lagrangian dual search;
//! - [`oracle`]: brute-force full-history maximization for the
//!   information-structure checks;
//! - [`gaussian`]: the Gaussian linear channel model, scalar closed forms and
//!   the matrix Riccati path;
//! - [`verify`]: the runnable acceptance checks behind `capfb verify`.

pub mod channel;
pub mod directed;
pub mod dp;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod prob;
pub mod verify;

pub use error::{CoreError, Result};
