use std::path::PathBuf;

use thiserror::Error;

/// Where a positivity check tripped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Cell(usize),
    Interface(usize),
    Unspecified,
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Cell(i) => write!(f, "cell {i}"),
            Location::Interface(k) => write!(f, "interface {k}"),
            Location::Unspecified => write!(f, "state"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {what} (value {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("positivity violation at {location}, step {step}: rho = {rho:e}, p = {p:e}")]
    Positivity {
        location: Location,
        step: u64,
        rho: f64,
        p: f64,
    },

    /// `displacement` is the distance from the interface to the foot in
    /// cells, positive upstream to the left.
    #[error("characteristic for interface {interface} moved {displacement} cells and left the stencil (CFL violation)")]
    CflViolation { interface: usize, displacement: f64 },

    #[error("foot position {0} lies outside the stored cell centers")]
    OutOfSpan(f64),

    #[error("length mismatch: field has {field} cells, reference has {reference}")]
    LengthMismatch { field: usize, reference: usize },

    #[error("Roe average is non-physical: c^2 = {0:e}")]
    RoeAverage(f64),

    #[error("no wave activity: maximum spectral radius is zero")]
    NoWaveSpeed,

    #[error("exact Riemann solver did not converge after {0} iterations")]
    NonConvergence(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Tags a positivity violation with the step at which it happened.
    pub(crate) fn at_step(self, n: u64) -> Self {
        match self {
            Error::Positivity {
                location, rho, p, ..
            } => Error::Positivity {
                location,
                step: n,
                rho,
                p,
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
