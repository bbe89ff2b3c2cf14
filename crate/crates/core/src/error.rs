use thiserror::Error;

/// Errors raised when an input violates a representation invariant or an
/// operation is asked for something outside its domain.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radius of ball {index} must be finite and positive, got {radius}")]
    NonPositiveRadius { index: usize, radius: f64 },
    #[error("balls {first} and {second} overlap or touch")]
    Overlap { first: usize, second: usize },
    #[error("grid spacing must be finite and positive, got {0}")]
    InvalidSpacing(f64),
    #[error("grid dimensions {dims:?} do not match {len} occupancy entries")]
    GridShape { dims: [usize; 3], len: usize },
    #[error("boundary radius is not positive at theta = {theta}")]
    NonPositiveBoundary { theta: f64 },
    #[error("{name} = {value} is outside its admissible range")]
    OutOfDomain { name: &'static str, value: f64 },
    #[error("operation is undefined for the empty set")]
    EmptySet,
    #[error("voxel sets do not share a lattice")]
    Misaligned,
    #[error("voxel sets share occupied cells")]
    CellOverlap,
    #[error("invalid Riesz parameters: dimension {dim}, exponent {exponent}")]
    InvalidRiesz { dim: u32, exponent: f64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("no sign change of {0} on the bracket")]
    NoBracket(&'static str),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::OutOfDomain { name, value })
    }
}
