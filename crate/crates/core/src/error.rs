use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("incompatible congruences {0:?}")]
    CrtConflict(Vec<(i64, u64)>),

    #[error("cannot embed Q(zeta_{from}) into Q(zeta_{to})")]
    Embedding { from: u64, to: u64 },

    #[error("character of conductor {conductor} does not factor through modulus {modulus}")]
    ConductorMismatch { conductor: u64, modulus: u64 },

    /// A trace that must be an algebraic integer came out with a denominator.
    /// This always indicates an engine or convention bug.
    #[error("integrality check failed for {context}: got {value}")]
    NonIntegral { context: String, value: String },
}

pub type Result<T> = std::result::Result<T, Error>;
