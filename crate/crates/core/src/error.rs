use thiserror::Error;

/// Errors raised by the numeric core.
///
/// Every variant is a domain error: an input outside the region where the
/// requested quantity is defined.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite input for {0}")]
    NonFinite(&'static str),

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} must lie in {range}, got {value}")]
    OutOfRange {
        name: &'static str,
        range: &'static str,
        value: f64,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("after-study variance {after} must be below the current variance {before}")]
    NoVarianceReduction { before: f64, after: f64 },

    #[error("projected evidence carries no spike-and-slab state")]
    MissingSpikeState,

    #[error("covariate id sets differ: {0}")]
    MismatchedIds(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(name))
    }
}

pub(crate) fn positive(name: &'static str, x: f64) -> Result<f64> {
    finite(name, x)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::NonPositive { name, value: x })
    }
}

pub(crate) fn open_unit(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(Error::OutOfRange {
            name,
            range: "(0, 1)",
            value: x,
        })
    }
}
