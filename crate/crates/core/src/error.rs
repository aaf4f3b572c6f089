use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants map one-to-one onto the failure modes of the public operations,
/// so callers (the CLI in particular) can route them to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("self-loop at vertex {0} rejected")]
    SelfLoopRejected(usize),
    #[error("need at least {min} vertices, got {got}")]
    TooFewVertices { min: usize, got: usize },
    #[error("basis arity {basis} does not match {factors} factor(s)")]
    ArityMismatch { basis: usize, factors: usize },
    #[error("factor {0} is not a binary adjacency matrix")]
    NonBinaryFactor(usize),
    #[error("entry ({i}, {j}) is not 0 or 1")]
    NonBinaryEntry { i: usize, j: usize },
    #[error("invalid NEPS basis: {0}")]
    InvalidBasis(String),
    #[error("invalid generator parameter: {0}")]
    InvalidExponent(String),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has a nonzero diagonal entry at {0}")]
    NonZeroDiagonal(usize),
    #[error("iteration did not converge (achieved residual {residual:e}, tolerance {tol:e})")]
    NoConvergence { residual: f64, tol: f64 },
    #[error("invalid noise specification: {0}")]
    InvalidNoiseSpec(String),
    #[error("degenerate error rates: p + q = {0} must be < 1")]
    DegenerateRates(f64),
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("truncation rank {s} outside 1..={n}")]
    RankOutOfRange { s: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("matrix has negative entries")]
    NegativeEntries,
    #[error("vector is not unit norm (norm {0})")]
    NotUnitNorm(f64),
    #[error("vertex set must be a nonempty proper subset")]
    EmptySide,
    #[error("a side of the cut has zero volume")]
    ZeroVolume,
    #[error("inputs are identical; ratio undefined")]
    IdenticalInputs,
    #[error("mixture fit failed: {0}")]
    FitFailed(String),
    #[error("infeasible error rates: p_hat + q_hat = {0} >= 1")]
    InfeasibleRates(f64),
    #[error("unknown statistic '{name}'; valid names: {valid}")]
    UnknownStatistic { name: String, valid: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }
}
