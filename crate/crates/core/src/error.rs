use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("at least two bodies are required, got {0}")]
    TooFewBodies(usize),
    #[error("mass must be nonzero (body {}, 1-based); every mass and the total mass must be nonzero", .index + 1)]
    ZeroMass { index: usize },
    #[error("total mass must be nonzero; the center of mass is undefined")]
    ZeroTotalMass,
    #[error("homogeneity degree alpha must be finite and >= 0, got {0}")]
    InvalidAlpha(f64),
    #[error("masses are not finite numbers")]
    NonFiniteMass,
    #[error("configuration has {got} bodies, expected {expected}")]
    BodyCountMismatch { expected: usize, got: usize },
    #[error("bodies {} and {} collide (separation {separation:e})", .i + 1, .j + 1)]
    Collision { i: usize, j: usize, separation: f64 },
    #[error("configuration contains non-finite coordinates")]
    NonFiniteCoordinates,
    #[error("cannot normalize: inertia or multiplier is degenerate ({0})")]
    DegenerateNormalization(String),
    #[error("configuration is not a normalized central configuration (residual {residual:e})")]
    NotNormalized { residual: f64 },
    #[error("Hessian spectrum is inconsistent: {0}")]
    InconsistentSpectrum(String),
    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
    #[error("invalid solver settings: {0}")]
    InvalidSettings(String),
}
