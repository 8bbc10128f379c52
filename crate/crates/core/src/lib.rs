//! Inscribed cyclic quadrilaterals and rectangles in closed curves on the
//! hyperbolic plane, the sphere and the Euclidean plane.

pub mod curve;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod inscribe;
pub mod io;
pub mod pullback;
pub mod quad;
pub mod random;

pub use curve::SampledCurve;
pub use error::{Error, Result};
pub use flow::PairState;
pub use geometry::{FrameAtPoint, Surface, SurfacePoint, TangentVector, Vec3};
pub use inscribe::oracle::{brute_force_oracle, solver_agrees_with_oracle, OracleMinimum};
pub use inscribe::{
    find_inscriptions, rectangle_search_sphere, validate_inscription, Inscription, PairMap, ValidationReport,
};
pub use pullback::PullbackConstants;
pub use quad::{AngleTriple, CirclePair};
