//! Error type shared by every module in the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong constructing grids, generating paths,
/// evaluating transforms, or running the solvers and verifiers.
///
/// Payloads are `f64` regardless of the scalar type in use so the enum
/// stays non-generic and cheap to match on.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Hurst parameter {0} outside the supported range [0.5, 1)")]
    HurstOutOfRange(f64),

    #[error("time grid needs a positive horizon and at least one step")]
    InvalidGrid,

    #[error("path length mismatch: grid wants {expected} values, got {got}")]
    PathLength { expected: usize, got: usize },

    #[error("fractional Brownian paths must start at 0, got {0}")]
    FbmNonzeroStart(f64),

    #[error("covariance needs nonnegative times, got t = {t}, s = {s}")]
    InvalidTime { t: f64, s: f64 },

    #[error("Cholesky factorization failed at pivot {pivot}; the covariance matrix is numerically singular")]
    CholeskyPivot { pivot: usize },

    #[error(
        "circulant embedding eigenvalue {value:.3e} at index {index} is negative beyond \
         round-off; use the cholesky generator for these parameters"
    )]
    EmbeddingNegativeEigenvalue { index: usize, value: f64 },

    #[error("skew level {0} outside the open interval (0, 1)")]
    AlphaOutOfRange(f64),

    #[error("transform base point must be >= 0, got {0}")]
    NegativeBase(f64),

    #[error("mollification index must be a positive integer")]
    MollificationIndex,

    #[error("operation needs a mollification index; construct the family with one")]
    MissingMollification,

    #[error("Hölder exponent {0} outside the open interval (0, 1)")]
    ExponentOutOfRange(f64),

    #[error("fractional order {0} outside the open interval (0, 1)")]
    OrderOutOfRange(f64),

    #[error("bad node sub-range [{from}, {to}] for a path with {len} nodes")]
    BadSubInterval { from: usize, to: usize, len: usize },

    #[error("paths live on different grids")]
    GridMismatch,

    #[error("evaluation point {t} outside the interval [{a}, {b}]")]
    PointOutsideInterval { t: f64, a: f64, b: f64 },

    #[error("interval endpoints must satisfy a < b")]
    InvalidInterval,

    #[error("interval endpoint {0} does not lie on a grid node")]
    EndpointOffGrid(f64),

    #[error("Hölder exponents sum to {0} <= 1; the Young pairing is not defined")]
    YoungCondition(f64),

    #[error("derivative-bound hypotheses need order + exponent > 1, got {0}")]
    BoundHypotheses(f64),

    #[error("initial condition 0 has no first-passage phase")]
    ZeroInitialCondition,

    #[error("driving path must start at 0")]
    DriverNonzeroStart,

    #[error("need at least {min} mollification indices, got {got}")]
    BadIndexList { min: usize, got: usize },

    #[error("mollification indices must be strictly increasing")]
    IndicesNotIncreasing,

    #[error("Monte Carlo estimate needs at least 2 paths")]
    TooFewPaths,

    #[error("probe count must be at least 1000")]
    ProbeCount,
}
