use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity argument must be finite and nonnegative, got {0}")]
    Domain(f64),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("invalid gain matrix: {0}")]
    InvalidGains(String),

    #[error("power must be finite and positive, got {0}")]
    InvalidPower(f64),

    #[error("transmitter set is empty")]
    EmptySet,

    #[error("objective is unbounded: no constraint bounds {0}")]
    Unbounded(&'static str),

    #[error("malformed constraint set: {0}")]
    InvalidConstraint(String),

    #[error("enumerating {what} for m = {m} exceeds the cap of {cap}; pass an explicit list instead")]
    EnumerationLimit { what: &'static str, m: usize, cap: usize },

    #[error("phase count t = {t} outside 3 < t < m + 2 for m = {m}")]
    PhaseCount { t: usize, m: usize },

    #[error("invalid decode configuration: {0}")]
    InvalidConfig(String),

    #[error("schedule needs B >= m, got B = {blocks}, m = {m}")]
    InsufficientBlocks { blocks: usize, m: usize },

    #[error("protocol undefined: {0}")]
    ProtocolUndefined(String),

    #[error("unknown protocol or regime: {0}")]
    UnknownProtocol(String),

    #[error("gain ordering requires 0 < h_min_sq <= h_max_sq, got {min} and {max}")]
    InvalidGainOrdering { min: f64, max: f64 },

    #[error("evaluator returned a non-finite value at P = {0}")]
    NonFinite(f64),

    #[error("fixed-point iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::DegenerateGeometry(_) => "degenerate_geometry",
            Error::InvalidGains(_) => "invalid_gains",
            Error::InvalidPower(_) => "invalid_power",
            Error::EmptySet => "empty_set",
            Error::Unbounded(_) => "unbounded",
            Error::InvalidConstraint(_) => "invalid_constraint",
            Error::EnumerationLimit { .. } => "enumeration_limit",
            Error::PhaseCount { .. } => "phase_count",
            Error::InvalidConfig(_) => "invalid_config",
            Error::InsufficientBlocks { .. } => "insufficient_blocks",
            Error::ProtocolUndefined(_) => "protocol_undefined",
            Error::UnknownProtocol(_) => "unknown_protocol",
            Error::InvalidGainOrdering { .. } => "invalid_gain_ordering",
            Error::NonFinite(_) => "non_finite",
            Error::NoConvergence(_) => "no_convergence",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
