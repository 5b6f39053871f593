use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("basis columns are not orthonormal (residual {residual:.3e})")]
    NonOrthonormalBasis { residual: f64 },

    #[error("rank {rank} is not admissible for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not idempotent (residual {residual:.3e})")]
    NotIdempotent { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("trace {trace} is not within 1e-6 of an integer")]
    RankAmbiguous { trace: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("scalar field mismatch: {0}")]
    FieldMismatch(String),

    #[error("two-projection decomposition failed (residual {residual:.3e})")]
    DecompositionFailed { residual: f64 },

    #[error("numerical instability in {context}: value {value}")]
    NumericalInstability { context: String, value: f64 },

    #[error("pair has a gap-one obstruction (dim H1 = {d1}, dim H2 = {d2})")]
    GapOneObstruction { d1: usize, d2: usize },

    #[error("projections coincide; no curve to build")]
    DegeneratePair,

    #[error("pair is not ~-related (|PQ| = {perp:.3e}, |(I-P)(I-Q)| = {coperp:.3e})")]
    NotSimRelated { perp: f64, coperp: f64 },

    #[error("R is not a midpoint: |R - {which}| = {distance} (expected 1/sqrt 2)")]
    NotMidpoint { which: &'static str, distance: f64 },

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("bad reparameterization: {0}")]
    BadReparam(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("capacity exhausted: {0}")]
    CapacityExhausted(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("map does not fit any unitary/antiunitary form (best residual {residual:.3e})")]
    Unclassifiable { residual: f64 },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("invalid JSON: {0}")]
    Json(String),
}

impl Error {
    /// True for failures of the numerics rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DecompositionFailed { .. }
                | Error::NumericalInstability { .. }
                | Error::CapacityExhausted(_)
                | Error::NoConvergence { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
