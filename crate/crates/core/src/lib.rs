//! Classical simulator for extracting a positive analytic function ψ(x)
//! from an amplitude-encoded n-qubit memory.
//!
//! The pipeline estimates prefix integrals Ψ(x) = ∫_{-1}^x ψ² with
//! binary-segmented amplitude estimation, interpolates them at (grid-snapped)
//! Chebyshev nodes, differentiates the interpolant to get ψ², and takes the
//! square root, while counting state-preparation queries.
//!
//! Module map:
//! - [`function_model`]: targets, normalization, grid sampling, oracles.
//! - [`quantum_memory`]: statevector, shifts, window probabilities.
//! - [`amplitude_estimation`]: exact/noisy/ML amplitude estimation, ledgers.
//! - [`prefix_integration`]: dyadic segmentation of prefix sums.
//! - [`chebyshev`]: nodes, Vandermonde systems, derivative, square root.
//! - [`pipeline`]: extraction, cost prediction, sweeps, verification.

pub mod amplitude_estimation;
pub mod chebyshev;
pub mod error;
pub mod exec;
pub mod function_model;
pub mod numeric;
pub mod pipeline;
pub mod prefix_integration;
pub mod quantum_memory;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Execution;
