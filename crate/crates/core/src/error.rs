use thiserror::Error;

use crate::algebra::Violation;
use crate::scalars::ScalarError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid {what}: {} violation(s)", violations.len())]
    Invalid { what: String, violations: Vec<Violation> },

    #[error("{what} needs a {rows}x{cols} matrix ({} entries), above the entry cap of {cap}", rows.saturating_mul(*cols))]
    EntryCap {
        what: String,
        rows: usize,
        cols: usize,
        cap: usize,
    },

    #[error("degree {degree} exceeds the degree cap of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("{context}: {message}")]
    Schema { context: String, message: String },

    #[error("{0}")]
    Precondition(String),

    #[error("{what} is not a valid deformation: {summary}")]
    InvalidDeformation { what: String, summary: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn schema(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            context: context.into(),
            message: message.into(),
        }
    }

    /// True for failures caused by resource limits rather than bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::EntryCap { .. } | Error::DegreeCap { .. })
    }
}

/// Size limits applied before any coboundary matrix is assembled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest permitted `rows * cols` of an assembled matrix.
    pub entry_cap: usize,
    /// Largest cochain degree that may be requested.
    pub max_degree: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            entry_cap: 2_000_000,
            max_degree: 5,
        }
    }
}

impl Limits {
    pub fn check_matrix(&self, what: impl Into<String>, rows: usize, cols: usize) -> Result<()> {
        match rows.checked_mul(cols) {
            Some(n) if n <= self.entry_cap => Ok(()),
            _ => Err(Error::EntryCap {
                what: what.into(),
                rows,
                cols,
                cap: self.entry_cap,
            }),
        }
    }

    pub fn check_degree(&self, degree: usize) -> Result<()> {
        if degree > self.max_degree {
            Err(Error::DegreeCap {
                degree,
                cap: self.max_degree,
            })
        } else {
            Ok(())
        }
    }
}
