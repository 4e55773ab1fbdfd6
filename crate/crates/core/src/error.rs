use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    // network construction and queries
    #[error("bus {0} does not exist")]
    UnknownBus(usize),
    #[error("bus ids must form the contiguous range 1..N (found {found} where {expected} was expected)")]
    NonContiguousIds { expected: usize, found: usize },
    #[error("branch {from}-{to} closes a cycle")]
    CycleDetected { from: usize, to: usize },
    #[error("bus {0} is not reachable from bus 1")]
    Disconnected(usize),
    #[error("branch {from}-{to} appears more than once")]
    DuplicateBranch { from: usize, to: usize },
    #[error("network has no root bus")]
    BadRoot,
    #[error("branch {from}-{to} has invalid impedance r={r}, x={x}")]
    BadImpedance { from: usize, to: usize, r: f64, x: f64 },

    // load models
    #[error("{what} coefficients sum to {sum}, expected 1")]
    CoefficientSumError { what: String, sum: f64 },
    #[error("voltage magnitude must be positive, got {0}")]
    NonpositiveVoltage(f64),
    #[error("squared voltage must be positive, got {0}")]
    NonpositiveSquaredVoltage(f64),
    #[error("device count must be at least 1")]
    ZeroCount,
    #[error("{what} must be positive, got {value}")]
    NonpositivePower { what: String, value: f64 },
    #[error("load at bus {bus} has negative demand ({p}, {q})")]
    NegativeLoad { bus: usize, p: f64, q: f64 },
    #[error("operation requires {expected} loads, found {found} at bus {bus}")]
    ModelMismatch {
        expected: &'static str,
        found: &'static str,
        bus: usize,
    },

    // solvers
    #[error("no convergence after {iterations} iterations (mismatch {mismatch:e})")]
    NotConverged { iterations: usize, mismatch: f64 },
    #[error("squared voltage at bus {bus} is {u}; operating point is infeasible")]
    NegativeSquaredVoltage { bus: usize, u: f64 },
    #[error("linear system is singular (reciprocal condition {rcond:e})")]
    SingularSystem { rcond: f64 },
    #[error("network is singular: {0}")]
    SingularNetwork(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    // attacks
    #[error("bus {0} is not a leaf")]
    NotLeaf(usize),
    #[error("bus {bus} baseline voltage {v:.6} is already at or below threshold {v_th}")]
    AlreadyViolated { bus: usize, v: f64, v_th: f64 },
    #[error("critical power at bus {bus} is negative ({p:e}); threshold is above the baseline voltage")]
    NegativeCriticalPower { bus: usize, p: f64 },
    #[error("denominator {0:e} is not positive; the attacked path has no impedance")]
    NonpositiveDenominator(f64),
    #[error("no device count up to {limit} reaches the threshold")]
    SearchExhausted { limit: u64 },

    // files
    #[error("{file}:{line}:{column}: {message}")]
    ParseError {
        file: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    UnitAmbiguity(String),
    #[error("network is not radial: {0}")]
    NonRadial(String),
    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownBus(_) => "UnknownBus",
            Error::NonContiguousIds { .. } => "NonContiguousIds",
            Error::CycleDetected { .. } => "CycleDetected",
            Error::Disconnected(_) => "Disconnected",
            Error::DuplicateBranch { .. } => "DuplicateBranch",
            Error::BadRoot => "BadRoot",
            Error::BadImpedance { .. } => "BadImpedance",
            Error::CoefficientSumError { .. } => "CoefficientSumError",
            Error::NonpositiveVoltage(_) => "NonpositiveVoltage",
            Error::NonpositiveSquaredVoltage(_) => "NonpositiveSquaredVoltage",
            Error::ZeroCount => "ZeroCount",
            Error::NonpositivePower { .. } => "NonpositivePower",
            Error::NegativeLoad { .. } => "NegativeLoad",
            Error::ModelMismatch { .. } => "ModelMismatch",
            Error::NotConverged { .. } => "NotConverged",
            Error::NegativeSquaredVoltage { .. } => "NegativeSquaredVoltage",
            Error::SingularSystem { .. } => "SingularSystem",
            Error::SingularNetwork(_) => "SingularNetwork",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NotLeaf(_) => "NotLeaf",
            Error::AlreadyViolated { .. } => "AlreadyViolated",
            Error::NegativeCriticalPower { .. } => "NegativeCriticalPower",
            Error::NonpositiveDenominator(_) => "NonpositiveDenominator",
            Error::SearchExhausted { .. } => "SearchExhausted",
            Error::ParseError { .. } => "ParseError",
            Error::UnitAmbiguity(_) => "UnitAmbiguity",
            Error::NonRadial(_) => "NonRadial",
            Error::UnknownName { .. } => "UnknownName",
            Error::Io { .. } => "Io",
        }
    }
}
