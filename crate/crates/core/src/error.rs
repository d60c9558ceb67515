use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failed at tau = {tau}: {reason}")]
    IntegrationFailure { tau: f64, reason: String },

    #[error("shooting bracket does not change sign: defect({lo}) = {defect_lo}, defect({hi}) = {defect_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        defect_lo: f64,
        defect_hi: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
