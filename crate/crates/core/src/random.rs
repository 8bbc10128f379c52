//! Seeded samplers for sweeps, property checks and benchmarks.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::geometry::{Surface, SurfacePoint, TangentVector, Vec3};
use crate::quad::AngleTriple;

/// Unit tangent vector at `base` with uniformly random direction.
pub fn random_unit_tangent<R: Rng + ?Sized>(base: &SurfacePoint, rng: &mut R) -> TangentVector {
    let s = base.surface();
    let e = [Vec3::x(), Vec3::y(), Vec3::z()]
        .into_iter()
        .map(|a| TangentVector::project(*base, a))
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .and_then(|t| t.unit().ok())
        .expect("some axis has a nonzero tangent projection");
    let angle = rng.random_range(0.0..TAU);
    TangentVector::project(*base, s.rotate(base.coords(), e.vec(), angle))
}

/// Tangent vector at `base` with uniform direction and norm in `(0, max_norm]`.
pub fn random_tangent<R: Rng + ?Sized>(base: &SurfacePoint, rng: &mut R, max_norm: f64) -> TangentVector {
    let n = max_norm * (1.0 - rng.random::<f64>());
    random_unit_tangent(base, rng).scaled(n)
}

/// Point within geodesic distance `max_radius` of the surface origin.
pub fn random_point<R: Rng + ?Sized>(surface: Surface, rng: &mut R, max_radius: f64) -> SurfacePoint {
    let o = SurfacePoint::origin(surface);
    let r = if surface == Surface::Spherical {
        max_radius.min(PI - 1e-3)
    } else {
        max_radius
    };
    let v = random_tangent(&o, rng, r);
    SurfacePoint::from_raw(surface, surface.exp(o.coords(), v.vec()))
}

/// Uniform sample from the valid triple region, by rejection from its bounding box.
pub fn random_triple<R: Rng + ?Sized>(rng: &mut R) -> AngleTriple {
    loop {
        let theta = rng.random_range(0.0..PI);
        let phi1 = rng.random_range(0.0..PI);
        let phi2 = rng.random_range(0.0..TAU);
        if let Ok(t) = AngleTriple::new(theta, phi1, phi2) {
            return t;
        }
    }
}
