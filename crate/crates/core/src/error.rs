use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("b must be positive (got {0})")]
    NonPositiveB(f64),

    #[error("l must be non-negative (got {0})")]
    NegativeL(f64),

    #[error("c must be non-zero for the constrained algebra")]
    ZeroC,

    #[error("a must be non-zero to match a superpotential")]
    ZeroA,

    #[error("parameter {name} is not finite")]
    NonFiniteParam { name: &'static str },

    #[error(
        "superpotential pole coefficient B must be positive (got {0}); a and c need opposite signs"
    )]
    NonPositivePole(f64),

    #[error("constraint l(l+1) = c^2 b/a^2 + c sqrt(b)/a violated (residual {residual:.3e})")]
    ConstraintViolated { residual: f64 },

    #[error("r must be positive (got {0})")]
    NonPositiveR(f64),

    #[error("hierarchy index mismatch: upper member k={upper} does not follow lower k={lower}")]
    IndexMismatch { lower: usize, upper: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("integration became non-finite at r = {r}")]
    NonFinite { r: f64 },

    #[error("no bracket for level n={n} below ceiling E={ceiling}")]
    BracketFailed { n: usize, ceiling: f64 },

    #[error("wavefunction norm underflowed")]
    ZeroNorm,

    #[error("unknown format '{0}' (expected human, csv or json)")]
    UnknownFormat(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
