use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid aperture: {0}")]
    InvalidAperture(String),

    #[error("invalid correlation kernel: {0}")]
    InvalidKernel(String),

    /// The Dirac kernel is a symbolic marker and has no sampled values.
    #[error("analytic-kernel: the Dirac kernel cannot be sampled; use the single-integral path")]
    AnalyticKernel,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-uniform lattice: spacing deviates by {deviation:e} (relative) at index {index}")]
    NonUniformLattice { index: usize, deviation: f64 },

    #[error("grid too coarse: dx = {dx} exceeds slit_width/8 = {limit}")]
    GridTooCoarse { dx: f64, limit: f64 },

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("line {line} at {value} lies outside the map window [{min}, {max}]")]
    OutsideWindow {
        line: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("oracle lattice of {requested} points exceeds the limit of {limit}")]
    OracleTooLarge { requested: usize, limit: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
