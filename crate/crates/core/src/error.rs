use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bisection for level {level} did not reach the requested width after {iterations} iterations")]
    BisectionStalled { level: usize, iterations: usize },

    #[error("spectrum did not converge below degree ceiling {ceiling} (largest residual {residual:e})")]
    NonConvergence { ceiling: usize, residual: f64 },

    #[error("plain double evaluation left the representable range at index {index}")]
    Overflow { index: usize },

    #[error("evaluation point {x} is numerically on a pole")]
    PoleProximity { x: f64 },

    #[error("series did not settle by truncation order {order}")]
    SeriesNotConverged { order: usize },
}
