use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OddsymError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient smoothness: {condition} needs exact second derivatives, but its input is tabulated")]
    InsufficientSmoothness { condition: String },

    #[error("quadrature: {0}")]
    Quadrature(String),

    #[error("flat region: inverse ill-conditioned (min slope {min_slope:e} < {threshold:e})")]
    FlatRegion { min_slope: f64, threshold: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("transform mismatch: energy before {before} vs after {after}")]
    TransformMismatch { before: f64, after: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: LastIterate,
    },

    #[error("no sign change of the shooting residual on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("trajectory escaped |u| > {bound} at x = {x}")]
    Escaped { bound: f64, x: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("not integrable: {0}")]
    NotIntegrable(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for OddsymError {
    fn from(e: std::io::Error) -> Self {
        OddsymError::Io(e.to_string())
    }
}

/// Last iterate of a failed solve; `Debug` shows only its size.
#[derive(Clone, PartialEq)]
pub struct LastIterate(pub Vec<f64>);

impl std::fmt::Debug for LastIterate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LastIterate({} values)", self.0.len())
    }
}

pub type Result<T> = std::result::Result<T, OddsymError>;
