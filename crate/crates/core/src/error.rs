use symcore::SymError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] SymError),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("constraint violation: {0}")]
    Constraint(String),

    /// A certificate that should vanish does not; carries the printed residual.
    #[error("certification failed: {what}: residual {residual}")]
    Certification { what: String, residual: String },

    #[error("fields are linearly dependent over constants")]
    LinearDependence,

    #[error("bracket [{i},{j}] = {bracket} is not in the span of the basis")]
    NotInSpan { i: usize, j: usize, bracket: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("no entries")]
    NoEntries,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn certification(what: impl Into<String>, residual: &symcore::Expr) -> Error {
        Error::Certification {
            what: what.into(),
            residual: residual.to_string(),
        }
    }
}
