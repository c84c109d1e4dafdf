use thiserror::Error;

/// Errors raised by the geometric, spectral and Lagrangian routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the valid range of the {chart} chart")]
    Domain { chart: &'static str, x: f64, y: f64 },

    #[error("invalid usage: {0}")]
    Usage(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("series truncation could not be certified: {0}")]
    Certification(String),

    #[error("solution blew up at t={t}: max|q|={max_abs_q}, enstrophy={enstrophy}")]
    BlowUp { t: f64, max_abs_q: f64, enstrophy: f64 },

    #[error("i/o: {0}")]
    Io(String),

    #[error("direction is undefined: {0}")]
    DegenerateDirection(String),
}

pub type Result<T> = std::result::Result<T, Error>;
