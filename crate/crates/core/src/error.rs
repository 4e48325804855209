use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::Boundary;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input does not describe a valid region, curve or grid.
    Geometry,
    /// A numerical step failed on otherwise valid input.
    Solver,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("degenerate parameterization on the {boundary} boundary at t = {t} (z'(t) = 0)")]
    DegenerateCurve { boundary: Boundary, t: f64 },

    #[error("boundary nodes {i} and {j} coincide; the curves touch or self-intersect")]
    CoincidentNodes { i: usize, j: usize },

    #[error("point {point} lies on the boundary (node {node})")]
    PointOnBoundary { point: Complex64, node: usize },

    #[error(
        "point {point} is not interior (outer winding {outer_winding:.3}, inner winding {inner_winding:.3})"
    )]
    NotInterior {
        point: Complex64,
        outer_winding: f64,
        inner_winding: f64,
    },

    #[error("this operation needs a doubly connected region")]
    NotDoublyConnected,

    #[error("length mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is singular to working precision (pivot ratio estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error(
        "least-squares system is rank deficient (condition estimate {condition:.3e}); \
         choose different parameters or a larger n"
    )]
    RankDeficient { condition: f64 },

    #[error("Szegő kernel nearly vanishes at node {node} (|S| / max|S| = {ratio:.3e}); move a0")]
    VanishingSzego { node: usize, ratio: f64 },

    #[error("recovered zero {point} escaped the region: {reason}")]
    ZeroOutsideRegion { point: Complex64, reason: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidCurve(_)
            | Error::InvalidRegion(_)
            | Error::InvalidGrid(_)
            | Error::DegenerateCurve { .. }
            | Error::CoincidentNodes { .. }
            | Error::PointOnBoundary { .. }
            | Error::NotInterior { .. }
            | Error::NotDoublyConnected => ErrorKind::Geometry,
            Error::DimensionMismatch { .. }
            | Error::Singular { .. }
            | Error::RankDeficient { .. }
            | Error::VanishingSzego { .. }
            | Error::ZeroOutsideRegion { .. } => ErrorKind::Solver,
        }
    }
}
