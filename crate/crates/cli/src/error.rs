use hcquad::QuadError;
use thiserror::Error;

/// Process exit codes.
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            CliError::Io(_) => 1,
            CliError::Quad(e) => match e {
                QuadError::BudgetOverflow { .. } | QuadError::OrderTooLarge { .. } => EXIT_RESOURCE,
                QuadError::EigenNoConvergence { .. }
                | QuadError::Evaluation { .. }
                | QuadError::UnboundedEstimate { .. }
                | QuadError::CertificationFailed { .. } => EXIT_NUMERICAL,
                _ => EXIT_INVALID,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        let code = |e: QuadError| CliError::from(e).exit_code();
        assert_eq!(code(QuadError::InvalidParam("x".into())), EXIT_INVALID);
        assert_eq!(code(QuadError::BudgetTooSmall { budget: 1, minimum: 2 }), EXIT_INVALID);
        assert_eq!(code(QuadError::BudgetOverflow { count: 10, cap: 1 }), EXIT_RESOURCE);
        assert_eq!(code(QuadError::OrderTooLarge { m: 1, max: 0 }), EXIT_RESOURCE);
        assert_eq!(code(QuadError::Evaluation { node: vec![1.0], reason: "nan".into() }), EXIT_NUMERICAL);
        assert_eq!(code(QuadError::CertificationFailed { bound: 1.5 }), EXIT_NUMERICAL);
        assert_eq!(CliError::Invalid("x".into()).exit_code(), EXIT_INVALID);
    }
}
