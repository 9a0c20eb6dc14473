use thiserror::Error;

/// Failures raised by the bound and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },
    #[error("non-finite value in term `{term}`")]
    Evaluation { term: &'static str },
    #[error("quadrature did not converge (achieved tolerance {achieved:e})")]
    NonConvergence { achieved: f64 },
    #[error("root bracket grew past {limit:e} without a sign change")]
    BracketGrowth { limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        field,
        reason: reason.into(),
    }
}

pub(crate) fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(
            field,
            format!("expected a positive finite value, got {v}"),
        ))
    }
}

pub(crate) fn check_nonnegative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(domain(
            field,
            format!("expected a nonnegative finite value, got {v}"),
        ))
    }
}

pub(crate) fn finite(term: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { term })
    }
}
