use thiserror::Error;

/// Errors raised by lattice construction, zeta evaluation, distribution
/// building and simulation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid base graph: {0}")]
    InvalidGraph(String),

    #[error("invalid crystal lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid periodic realization: {0}")]
    InvalidRealization(String),

    #[error(
        "path is not composable at position {position}: edge {previous} ends at vertex {end}, \
         but edge {next} starts at vertex {start}"
    )]
    NonComposablePath {
        position: usize,
        previous: usize,
        next: usize,
        end: usize,
        start: usize,
    },

    #[error("ambiguous location: {count} lattice points lie within tolerance {tol} (realization is nearly degenerate)")]
    AmbiguousLocation { count: usize, tol: f64 },

    #[error("unknown preset {0:?}; available presets: line, square, triangular, hexagonal")]
    UnknownPreset(String),

    #[error("malformed config: {0}")]
    Config(String),

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("outside the convergence region: {0}")]
    ConvergenceRegion(String),

    #[error("pole: factor {index} has denominator of magnitude {magnitude:e}")]
    Pole { index: usize, magnitude: f64 },

    #[error(
        "not a characteristic function: alpha[{index}] = {value} < 0 \
         (compound Poisson validity requires every alpha >= 0)"
    )]
    NotCharacteristic { index: usize, value: f64 },

    #[error("ratio |alpha * exp(-<a, sigma>)| = {ratio} for factor {index} is not below 1")]
    RatioOutOfRange { index: usize, ratio: f64 },

    #[error("vectors are rank deficient: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("no kernel for base vertex {0}")]
    MissingKernel(String),

    #[error("analytic CF unavailable; use empirical CF ({0})")]
    AnalyticCfUnavailable(String),

    #[error("lattice closure violated: {0}")]
    LatticeClosure(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("degenerate chi-square test: {0}")]
    DegenerateChiSquare(String),

    #[error("oracle truncation deficit {deficit:e} exceeds {limit:e}; enlarge the support radius")]
    OracleDeficit { deficit: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
