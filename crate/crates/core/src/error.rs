use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("density tail does not vanish within {periods} periods (remaining mass {tail:e})")]
    HeavyTail { periods: usize, tail: f64 },

    #[error(
        "Fourier rate alpha = {alpha} is not below 1; the density is atomic or under-resolved"
    )]
    NonContracting { alpha: f64 },

    #[error("interval [{t0}, {t1}] is reversed or starts before 0")]
    BadInterval { t0: f64, t1: f64 },

    #[error("time {t} lies outside [{start}, {end}]")]
    OutOfRange { t: f64, start: f64, end: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{bad} of {total} rows malformed in {path}; first problems: {summary}")]
    TooManyMalformed {
        path: PathBuf,
        bad: usize,
        total: usize,
        summary: String,
    },

    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Rejects values that are not finite and strictly positive.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::param(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}
