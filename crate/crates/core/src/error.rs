//! Error type shared by all modules of the crate.

use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the analytic and simulation routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument was outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not reach the requested tolerance within the
    /// subdivision budget. Carries the partial estimate and its error bound.
    #[error("quadrature failed to converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureFailure {
        estimate: Complex64,
        error_bound: f64,
    },

    /// Network configuration violated an invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The moment-matched Beta fit is degenerate (zero variance); the
    /// distribution collapses to a point mass at `mean`.
    #[error("degenerate distribution: point mass at {mean}")]
    DegenerateDistribution { mean: f64 },

    /// Gil-Pelaez inversion could not reach the requested accuracy.
    /// Carries the partial estimate.
    #[error("inversion integral failed: partial estimate {partial}, error bound {error_bound}")]
    IntegrationFailure { partial: f64, error_bound: f64 },

    /// A curve point could not be evaluated.
    #[error("curve evaluation failed at x = {x}: {source}")]
    CurvePoint {
        x: f64,
        #[source]
        source: Box<Error>,
    },

    /// Monte Carlo failure (for example, a tier stayed empty after the
    /// resample budget was exhausted).
    #[error("simulation error: {0}")]
    Simulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
