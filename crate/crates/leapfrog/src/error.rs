use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("kernel evaluated at coincident points")]
    Singular,

    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, state: Vec<f64>, reason: String },

    #[error("no return to the section before t = {t_max}")]
    NonPeriodic { t_max: f64 },

    #[error("quadrature did not converge for {what} (last change {change:e})")]
    Quadrature { what: &'static str, change: f64 },

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("trajectory span [{have_min}, {have_max}] does not cover [{need_min}, {need_max}]")]
    Span {
        have_min: f64,
        have_max: f64,
        need_min: f64,
        need_max: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Reject non-finite values and values outside an open interval.
pub(crate) fn check_open(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}
