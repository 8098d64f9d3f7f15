use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid wall motion: {0}")]
    InvalidMotion(String),

    #[error("wall collapsed at t = {t}: radius {radius} <= 0")]
    CollapsedWall { t: f64, radius: f64 },

    #[error("r = {r} lies outside the well of radius {radius}")]
    OutsideWell { r: f64, radius: f64 },

    #[error("quadrature failed to converge: order {order}, last estimate {estimate}, last change {change}")]
    QuadratureFailure { order: usize, estimate: f64, change: f64 },

    #[error("finite-difference steps too coarse: discretization estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepTooCoarse { estimate: f64, tolerance: f64 },

    #[error("propagation did not converge: {0}")]
    Convergence(String),

    #[error("adiabatic regime violated: overlap dipped to {min_overlap}")]
    AdiabaticityViolated { min_overlap: f64 },

    #[error("sideband truncation invalid: {0}")]
    Truncation(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
