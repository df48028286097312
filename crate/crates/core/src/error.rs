use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config file line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("Bessel order {0} is not supported")]
    UnsupportedOrder(f64),

    #[error("Bessel argument {0} outside (0, 500]")]
    BesselDomain(f64),

    #[error("Bessel evaluation did not converge at x = {0}")]
    BesselConvergence(f64),

    #[error("found only {found} of {requested} roots below x = {x_max}")]
    RootsNotFound {
        found: usize,
        requested: usize,
        x_max: f64,
    },

    #[error("momentum index {0} is not in the basis index set")]
    IndexOutOfSet(i64),

    #[error("state representation mismatch: {0}")]
    RepresentationMismatch(&'static str),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian: defect {defect:e} exceeds {tolerance:e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("matrix has {len} entries, expected {dim}x{dim}")]
    DimensionMismatch { dim: usize, len: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("kernel {0} is not defined for this boundary phase")]
    KernelKind(&'static str),

    #[error("quantum number {n} exceeds the {available} computed levels")]
    LevelOutOfRange { n: usize, available: usize },

    #[error("ambiguous nodal classification: {0} near-zeros")]
    AmbiguousNodes(usize),

    #[error("parity of state is not definite (defect {0:e})")]
    AmbiguousParity(f64),

    #[error("variance minimum lies on the window boundary; widen the window")]
    MinimumOnBoundary,

    #[error("variance is flat over the window; no interior minimum")]
    NoInteriorMinimum,

    #[error("centroid never changes sign on the window")]
    NoCrossing,

    #[error("need at least {min} points for the fit, got {got}")]
    InsufficientPoints { min: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
