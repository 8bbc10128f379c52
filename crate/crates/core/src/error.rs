use thiserror::Error;

use crate::geometry::Surface;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is not on the {surface:?} model surface: {reason}")]
    NotOnSurface { surface: Surface, reason: String },

    #[error("vector is not tangent at its base point (deviation {deviation:e})")]
    NotTangent { deviation: f64 },

    #[error("operands live on different surfaces ({0:?} vs {1:?})")]
    SurfaceMismatch(Surface, Surface),

    #[error("tangent vector is not based at the given point")]
    BaseMismatch,

    #[error("spherical geodesic length {0} is at or beyond the injectivity radius")]
    BeyondInjectivity(f64),

    #[error("antipodal pair: the geodesic between the points is not unique")]
    Antipodal,

    #[error("zero tangent vector where a direction is required")]
    ZeroVector,

    #[error("coincident points: the construction has a continuum of solutions")]
    CoincidentPoints,

    #[error("points are closer than the near-diagonal guard ({distance:e} < {guard:e})")]
    NearDiagonal { distance: f64, guard: f64 },

    #[error("invalid angle {name} = {value}: {reason}")]
    InvalidAngle {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid angle triple (theta, phi1, phi2) = ({theta}, {phi1}, {phi2}): {reason}")]
    InvalidTriple {
        theta: f64,
        phi1: f64,
        phi2: f64,
        reason: &'static str,
    },

    #[error("invalid radius {0}")]
    InvalidRadius(f64),

    #[error("no admissible circle: {0}")]
    NoCircle(&'static str),

    #[error("{0:?} surface does not support this operation")]
    UnsupportedSurface(Surface),

    #[error("pullback block residual {residual:e} exceeds tolerance {tolerance:e}")]
    BlockResidual { residual: f64, tolerance: f64 },

    #[error("integration left the admissible domain: {0}")]
    FlowDomain(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve diameter {diameter} is not below pi")]
    DiameterTooLarge { diameter: f64 },

    #[error("seed lies in the diagonal band")]
    DiagonalCollapse,

    #[error("refinement did not converge (best residual {best:e} after {iterations} iterations)")]
    NonConvergence { best: f64, iterations: usize },

    #[error("duplicate of an already found inscription")]
    Duplicate,

    #[error("grid size {n} is below the minimum {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("curve spec: {0}")]
    Spec(String),

    #[error("result record: {0}")]
    Record(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
