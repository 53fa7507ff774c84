use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} needs {size} but the cap is {cap}")]
    Cap { what: String, size: u128, cap: u128 },

    #[error("sampling budget exhausted after {attempts} attempts: {what}")]
    Budget { what: String, attempts: usize },

    #[error("collection is not regular: {0}")]
    NotRegular(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("iteration did not converge (residual {residual:.3e})")]
    Convergence { residual: f64 },

    #[error("oracle contract violated: {0}")]
    Contract(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn cap(what: impl Into<String>, size: u128, cap: u128) -> Self {
        Error::Cap {
            what: what.into(),
            size,
            cap,
        }
    }

    pub(crate) fn check_cap(what: &str, size: u128, cap: u128) -> Result<()> {
        if size > cap {
            Err(Self::cap(what, size, cap))
        } else {
            Ok(())
        }
    }
}
