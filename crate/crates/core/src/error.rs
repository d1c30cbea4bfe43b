use thiserror::Error;

/// Errors raised by the design-space pipeline.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("specification error: {0}")]
    Specification(String),

    #[error("region {region} is infeasible at R={lookup_bits}")]
    InfeasibleRegion { lookup_bits: u32, region: u64 },

    #[error("no shift k <= {k_max} admits a polynomial in region {region}")]
    ShiftLimit { k_max: u32, region: u64 },

    #[error("region {region} admits no integer polynomial at shift k={k}")]
    NoPolynomialAtShift { k: u32, region: u64 },

    #[error("region {region} has no coefficients after {stage}")]
    EmptyRegion { region: u64, stage: &'static str },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("resource limit: {0}")]
    Resource(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
