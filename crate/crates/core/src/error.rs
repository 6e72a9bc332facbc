use thiserror::Error;

/// Errors raised by rule construction, grid assembly and certification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("coordinate {index} = {value} lies outside the half-line domain")]
    DomainViolation { index: usize, value: f64 },

    #[error("weight has a pole at zero coordinate {index} (exponent {exponent})")]
    Pole { index: usize, exponent: f64 },

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} sweeps")]
    EigenNoConvergence { index: usize, iterations: usize },

    #[error("truncated rule of order {m} is empty at theta = {theta}")]
    EmptyRule { m: usize, theta: f64 },

    #[error("order {m} exceeds the supported maximum {max}")]
    OrderTooLarge { m: usize, max: usize },

    #[error("grid needs {count} evaluations, cap is {cap}")]
    BudgetOverflow { count: u128, cap: u128 },

    #[error("node budget {budget} is below the smallest grid ({minimum} points)")]
    BudgetTooSmall { budget: u128, minimum: u128 },

    #[error("integrand evaluation failed at {node:?}: {reason}")]
    Evaluation { node: Vec<f64>, reason: String },

    #[error("norm estimate did not converge: tail contributes {tail:e} of {total:e}")]
    UnboundedEstimate { tail: f64, total: f64 },

    #[error("certified norm bound {bound} exceeds the unit ball")]
    CertificationFailed { bound: f64 },
}

pub type Result<T> = std::result::Result<T, QuadError>;
