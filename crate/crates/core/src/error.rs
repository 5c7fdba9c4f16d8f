use thiserror::Error;

/// Failure modes shared by the analytic and asymptotic builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("outside the domain of definition: {0}")]
    Domain(String),
    #[error("no solution of the requested type exists: {0}")]
    Existence(String),
    #[error("value outside the admissible range: {0}")]
    Range(String),
    #[error("resonant correction denominator: {0}")]
    Resonance(String),
    #[error("no Melnikov root with index {index} (found {found})")]
    NoRoot { index: usize, found: usize },
    #[error("Melnikov root x** = {x} is within tolerance of the interval boundary")]
    BoundaryRoot { x: f64 },
    #[error("x = {x} lies outside slow segment {segment}")]
    Interval { segment: &'static str, x: f64 },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("root finder failed to converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
