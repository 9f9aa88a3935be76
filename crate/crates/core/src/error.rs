use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} lies outside the open unit disc")]
    OutsideDisc { name: &'static str, value: Complex64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("derivative data too short: need {needed} entries, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("vector lies outside the summand span (projection residual {residual:e})")]
    OutsideSpan { residual: f64 },
    #[error("summand {m} is empty")]
    EmptySummand { m: usize },
    #[error("kernel value {value:e} at z = {z} is not positive")]
    NonPositiveKernel { z: Complex64, value: f64 },
    #[error("vanishing denominator at sample {index}")]
    VanishingDenominator { index: usize },
    #[error("contract violated: {0}")]
    ContractViolation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_in_disc(name: &'static str, value: Complex64) -> Result<()> {
    if value.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc { name, value })
    }
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be a positive real, got {value}"
        )))
    }
}
