use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("wavefunction norm is zero or not finite (norm² = {0})")]
    DegenerateNorm(f64),

    #[error("wavefunction is not normalized (norm² = {0}, tolerance 1e-6)")]
    NotNormalized(f64),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(
        "numerical instability after {steps} steps: dt = {dt:e} exceeds the stable range \
         (explicit ceiling dt <= M·h²/ħ = {ceiling:e})"
    )]
    Unstable { steps: u64, dt: f64, ceiling: f64 },

    #[error("phase unwrap failed: {0}")]
    PhaseUnwrap(String),

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error(
        "separation too small: |r̄₁ − r̄₂| / (Δr)₀ = {ratio:.3} must exceed {min}; the \
         far-separation expansion requires (Δr)₀ ≪ |r̄₁ − r̄₂|"
    )]
    SeparationTooSmall { ratio: f64, min: f64 },

    #[error("coincident centroids: the Newton force is undefined")]
    CoincidentBodies,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
