use thiserror::Error;

/// Errors raised by the verification engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A log/pow/div was requested at a point where the base value vanishes.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: {op} of {lhs_rows}x{lhs_cols} with {rhs_rows}x{rhs_cols}")]
    Shape {
        op: &'static str,
        lhs_rows: usize,
        lhs_cols: usize,
        rhs_rows: usize,
        rhs_cols: usize,
    },

    #[error("usage error: {0}")]
    Usage(String),

    /// A parameter set violates a family invariant (isotropy, index order, a != 0, ...).
    #[error("validation error: {0}")]
    Validation(String),

    #[error("jet-evaluation budget exceeded: {required} evaluations > budget {budget}")]
    Budget { required: u128, budget: u128 },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 for usage and validation errors, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Validation(_) => 2,
            Error::Io(_) => 3,
            _ => 1,
        }
    }
}
