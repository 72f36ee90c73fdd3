//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction and the numerical engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A momentum vector or offset had the wrong number of components.
    #[error("dimension mismatch: expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Coupling table violates the cyclic symmetry V_l = V_{-l}.
    #[error("asymmetric coupling table: offset {offset:?} carries {value} but its mirror carries {mirror}")]
    AsymmetricCoupling {
        offset: Vec<i64>,
        value: f64,
        mirror: f64,
    },

    /// Bosonic coupling matrix has an eigenvalue below the stability tolerance.
    #[error("unstable Hamiltonian: minimum coupling eigenvalue {lambda_min:.3e} is negative beyond tolerance {tol:.1e}")]
    UnstableHamiltonian { lambda_min: f64, tol: f64 },

    /// A bosonic chain spectrum vanishes at some discrete momentum and no
    /// mass regularizer was supplied.
    #[error("critical zero mode: chain spectrum vanishes at momentum index {index}; supply a mass regularizer")]
    CriticalZeroMode { index: usize },

    /// The symbol (sign of the dispersion) is identically zero.
    #[error("degenerate symbol: dispersion vanishes identically on [0, 2pi)")]
    DegenerateSymbol,

    /// A covariance restriction failed its positive-definiteness contract.
    #[error("covariance restriction is not positive definite")]
    NotPositiveDefinite,

    /// A spectrum value escaped its physical range by more than the hard
    /// tolerance.
    #[error("eigenvalue {value} violates bound {bound} by more than {tol:.1e}")]
    EigenvalueOutOfRange {
        value: f64,
        bound: &'static str,
        tol: f64,
    },

    /// A resolution-doubling sequence failed to contract.
    #[error("no convergence: {0}")]
    NoConvergence(String),

    /// A non-finite value entered an aggregation that forbids it.
    #[error("non-finite value in aggregation at grid index {index}")]
    NonFiniteAggregate { index: usize },

    /// Malformed model/experiment configuration text.
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// Catch-all precondition violation.
    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
