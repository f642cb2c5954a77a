use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("fluctuation {0} has no inverse derivative")]
    UnsupportedInverse(String),

    #[error("no root of f'(m) = {target} inside [{lo}, {hi}]")]
    InverseOutOfBracket { target: f64, lo: f64, hi: f64 },

    #[error("effective transverse field {0} is not positive")]
    DegenerateField(f64),

    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),

    #[error("no crossing between the transverse-magnetization curve and f'^-1 on grid [{min}, {max}]")]
    NoCrossing { min: f64, max: f64 },

    #[error("crossing at {0} lies outside the sampled grid")]
    Extrapolation(f64),

    #[error("crossing selection is unresolved; pick a crossing explicitly")]
    MustSelect,

    #[error("{n} spins exceeds the limit of {limit} for {method}; use spin_symmetric_exact for uniform models")]
    SizeLimit {
        n: usize,
        limit: usize,
        method: &'static str,
    },

    #[error("grid point {gamma_tilde}: {source}")]
    AtGridPoint {
        gamma_tilde: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error class, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Argument(_) => ErrorKind::Config,
            Error::Io { .. } => ErrorKind::Io,
            Error::AtGridPoint { source, .. } => source.kind(),
            _ => ErrorKind::Numerical,
        }
    }

    pub(crate) fn at_grid_point(self, gamma_tilde: f64) -> Error {
        Error::AtGridPoint {
            gamma_tilde,
            source: Box::new(self),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
