use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("undeclared identifier `{name}` at {pos}")]
    Undeclared { name: String, pos: usize },

    #[error("`{name}` expects {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("division by an expression that is identically zero")]
    DivisionByZero,

    #[error("logarithm of zero")]
    LogOfZero,

    #[error("expression is not polynomial in `{atom}`: {detail}")]
    NotPolynomial { atom: String, detail: String },

    #[error("jet order overflow: `{0}` exceeds the maximal order 3")]
    OrderOverflow(String),

    #[error("invalid binding: {0}")]
    Binding(String),

    #[error("parameter `{0}`: {1}")]
    Parameter(String, String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, SymError>;
