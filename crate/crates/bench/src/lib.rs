//! Shared fixtures for the benchmarks.

use std::f64::consts::TAU;

use quadscribe_core::io::chart::disk_to_hyperboloid;
use quadscribe_core::{SampledCurve, Surface, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Disk-model circle of radius 0.5 with a third-harmonic wobble.
pub fn hyperbolic_curve(n: usize) -> SampledCurve {
    SampledCurve::from_fn(Surface::Hyperbolic, n, |t| {
        let a = TAU * t;
        let r = 0.5 + 0.05 * (3.0 * a).cos();
        disk_to_hyperboloid([r * a.cos(), r * a.sin()]).expect("inside the disk")
    })
    .expect("valid curve")
}

/// Latitude circle at geodesic radius 1 with a two-lobed wobble.
pub fn spherical_curve(n: usize) -> SampledCurve {
    SampledCurve::from_fn(Surface::Spherical, n, |t| {
        let a = TAU * t;
        let r = 1.0 + 0.05 * (2.0 * a).cos();
        Vec3::new(r.sin() * a.cos(), r.sin() * a.sin(), r.cos())
    })
    .expect("valid curve")
}
