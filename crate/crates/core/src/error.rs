use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Where in a chain a numerical failure happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumericalContext {
    pub condition: usize,
    pub column: usize,
    pub iteration: Option<usize>,
}

impl fmt::Display for NumericalContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}, column {}", self.condition, self.column)?;
        if let Some(it) = self.iteration {
            write!(f, ", iteration {it}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("matrix out of domain: {0}")]
    MatrixDomain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical degeneracy ({context}): {detail}")]
    Numerical {
        context: NumericalContext,
        detail: String,
    },
    #[error("sampler diverged: {0}")]
    Divergence(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("ingestion error at {location}: {message}")]
    Ingestion { location: String, message: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ParameterDomain(_) => "parameter_domain",
            Error::MatrixDomain(_) => "matrix_domain",
            Error::Config(_) => "configuration",
            Error::Numerical { .. } => "numerical",
            Error::Divergence(_) => "divergence",
            Error::Usage(_) => "usage",
            Error::Ingestion { .. } => "ingestion",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical { .. } | Error::Divergence(_))
    }

    pub(crate) fn with_iteration(self, iteration: usize) -> Self {
        match self {
            Error::Numerical {
                mut context,
                detail,
            } => {
                context.iteration = Some(iteration);
                Error::Numerical { context, detail }
            }
            Error::Divergence(msg) => Error::Divergence(format!("{msg} (iteration {iteration})")),
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
