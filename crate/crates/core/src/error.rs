use thiserror::Error;

/// Failures raised by the closed-form evaluators, the integrator and the oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("state has {got} sites but the unit cell has {expected}")]
    StateLength { expected: usize, got: usize },

    #[error("non-finite angle at site {site}")]
    NonFiniteAngle { site: usize },

    /// All sites sit at θ = π (or the cell gap 1 − β underflowed), so the
    /// dominant eigenvector of the cell transfer matrix is not unique.
    #[error("degenerate manifold: |lambda_2| = 1 (1 - beta = {gap:e})")]
    Degenerate { gap: f64 },

    #[error("pole at site {site}: theta = {theta} (sin theta = {sin:e})")]
    Pole { site: usize, theta: f64, sin: f64 },

    #[error("resonant Gram inverse: 1 - prod(c~) = {gap:e}")]
    Resonance { gap: f64 },

    #[error("form requires J = {expected}, got J = {got}")]
    WrongSpin { expected: f64, got: f64 },

    #[error("series does not converge: |prod c~| = {0}")]
    SeriesDivergence(f64),

    #[error("power iteration did not converge: |lambda_2 / lambda_1| = {0}")]
    PowerIteration(f64),

    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("system size L = {l} is not compatible with K = {k} (need L >= 3 and K | L)")]
    SystemSize { l: usize, k: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
