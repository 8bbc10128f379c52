//! Coordinate charts used by curve specs and figures.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Surface, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chart {
    PoincareDisk,
    UpperHalfPlane,
    Stereographic,
    /// Model coordinates: hyperboloid, unit sphere, or the plane `z = 0`.
    EmbeddedR3,
    Plane,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::PoincareDisk => "poincare-disk",
            Chart::UpperHalfPlane => "upper-half-plane",
            Chart::Stereographic => "stereographic",
            Chart::EmbeddedR3 => "embedded-r3",
            Chart::Plane => "plane",
        }
    }

    /// Number of coordinates of a point in this chart.
    pub fn dim(self) -> usize {
        match self {
            Chart::EmbeddedR3 => 3,
            _ => 2,
        }
    }

    pub fn supports(self, surface: Surface) -> bool {
        matches!(
            (surface, self),
            (
                Surface::Hyperbolic,
                Chart::PoincareDisk | Chart::UpperHalfPlane | Chart::EmbeddedR3
            ) | (Surface::Spherical, Chart::Stereographic | Chart::EmbeddedR3)
                | (Surface::Euclidean, Chart::Plane | Chart::EmbeddedR3)
        )
    }

    /// The chart used for figures when none is given.
    pub fn default_for(surface: Surface) -> Self {
        match surface {
            Surface::Hyperbolic => Chart::PoincareDisk,
            Surface::Spherical => Chart::Stereographic,
            Surface::Euclidean => Chart::Plane,
        }
    }
}

/// Poincaré disk to hyperboloid: `((1 + |w|²), 2w) / (1 - |w|²)`.
pub fn disk_to_hyperboloid(w: [f64; 2]) -> Result<Vec3> {
    let r2 = w[0] * w[0] + w[1] * w[1];
    if !(r2 < 1.0) {
        return Err(Error::Spec(format!(
            "point ({}, {}) is not inside the unit disk",
            w[0], w[1]
        )));
    }
    Ok(Vec3::new(1.0 + r2, 2.0 * w[0], 2.0 * w[1]) / (1.0 - r2))
}

pub fn hyperboloid_to_disk(p: &Vec3) -> [f64; 2] {
    [p.y / (1.0 + p.x), p.z / (1.0 + p.x)]
}

/// Cayley transform `w = (z - i) / (z + i)`.
pub fn half_plane_to_disk(z: [f64; 2]) -> Result<[f64; 2]> {
    let (x, y) = (z[0], z[1]);
    if !(y > 0.0) {
        return Err(Error::Spec(format!("point ({x}, {y}) is not in the upper half-plane")));
    }
    let den = x * x + (y + 1.0) * (y + 1.0);
    Ok([(x * x + y * y - 1.0) / den, -2.0 * x / den])
}

/// Inverse Cayley transform `z = i (1 + w) / (1 - w)`.
pub fn disk_to_half_plane(w: [f64; 2]) -> [f64; 2] {
    let (a, b) = (w[0], w[1]);
    let den = (1.0 - a) * (1.0 - a) + b * b;
    [-2.0 * b / den, (1.0 - a * a - b * b) / den]
}

/// Stereographic projection from the south pole, inverted:
/// `(2X, 2Y, 1 - X² - Y²) / (1 + X² + Y²)`.
pub fn stereographic_to_sphere(z: [f64; 2]) -> Vec3 {
    let r2 = z[0] * z[0] + z[1] * z[1];
    Vec3::new(2.0 * z[0], 2.0 * z[1], 1.0 - r2) / (1.0 + r2)
}

pub fn sphere_to_stereographic(p: &Vec3) -> [f64; 2] {
    [p.x / (1.0 + p.z), p.y / (1.0 + p.z)]
}

/// Closed-form Poincaré-disk distance.
pub fn disk_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2);
    let na = 1.0 - a[0] * a[0] - a[1] * a[1];
    let nb = 1.0 - b[0] * b[0] - b[1] * b[1];
    (1.0 + 2.0 * d2 / (na * nb)).acosh()
}

/// Chart coordinates to model coordinates.
pub fn to_model(surface: Surface, chart: Chart, c: &[f64]) -> Result<Vec3> {
    if !chart.supports(surface) {
        return Err(Error::Spec(format!(
            "chart {} does not apply to the {} surface",
            chart.name(),
            surface.name()
        )));
    }
    if c.len() != chart.dim() {
        return Err(Error::Spec(format!(
            "chart {} takes {} coordinates, got {}",
            chart.name(),
            chart.dim(),
            c.len()
        )));
    }
    if c.iter().any(|x| !x.is_finite()) {
        return Err(Error::Spec("non-finite coordinate".into()));
    }
    match chart {
        Chart::PoincareDisk => disk_to_hyperboloid([c[0], c[1]]),
        Chart::UpperHalfPlane => disk_to_hyperboloid(half_plane_to_disk([c[0], c[1]])?),
        Chart::Stereographic => Ok(stereographic_to_sphere([c[0], c[1]])),
        Chart::Plane => Ok(Vec3::new(c[0], c[1], 0.0)),
        Chart::EmbeddedR3 => Ok(surface.project_point(&Vec3::new(c[0], c[1], c[2]))),
    }
}

/// Model coordinates to chart coordinates.
pub fn from_model(surface: Surface, chart: Chart, p: &Vec3) -> Vec<f64> {
    match (surface, chart) {
        (_, Chart::EmbeddedR3) => vec![p.x, p.y, p.z],
        (Surface::Hyperbolic, Chart::UpperHalfPlane) => disk_to_half_plane(hyperboloid_to_disk(p)).to_vec(),
        (Surface::Hyperbolic, _) => hyperboloid_to_disk(p).to_vec(),
        (Surface::Spherical, _) => sphere_to_stereographic(p).to_vec(),
        (Surface::Euclidean, _) => vec![p.x, p.y],
    }
}
