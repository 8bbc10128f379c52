//! Cyclic quadrilateral maps.
//!
//! `F_φ(x, v) = (exp(x, v), exp(x, e^{iφ} v))` sends a centred radial vector to a
//! pair of points on the geodesic circle of radius `‖v‖` about `x`. The
//! quadrilateral map `I = F_{φ2} ∘ R_θ ∘ F_{φ1}⁻¹` takes `(p1, p3)` to `(p2, p4)`
//! for the quadrilateral with vertex angles `(0, θ, φ1, φ2 + θ)` about `x`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{wrap_signed, Surface, SurfacePoint, TangentVector, Vec3};

/// Closest approach accepted by [`quad_map`]; the circle degenerates as `q → p`.
pub const NEAR_DIAGONAL_GUARD: f64 = 1e-8;

/// Oriented-angle residual the center refinement must reach.
pub const ORIENTATION_TOLERANCE: f64 = 1e-11;

/// Type `(θ, φ1, φ2)` of a cyclic quadrilateral, constrained by
/// `0 < θ < φ1 ≤ π` and `φ1 < φ2 + θ < 2π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct AngleTriple {
    theta: f64,
    phi1: f64,
    phi2: f64,
}

impl AngleTriple {
    pub fn new(theta: f64, phi1: f64, phi2: f64) -> Result<Self> {
        let fail = |reason| Error::InvalidTriple {
            theta,
            phi1,
            phi2,
            reason,
        };
        if !(theta.is_finite() && phi1.is_finite() && phi2.is_finite()) {
            return Err(fail("angles must be finite"));
        }
        if !(0.0 < theta && theta < phi1 && phi1 <= PI) {
            return Err(fail("need 0 < theta < phi1 <= pi"));
        }
        if !(phi1 < phi2 + theta && phi2 + theta < TAU) {
            return Err(fail("need phi1 < phi2 + theta < 2 pi"));
        }
        Ok(Self { theta, phi1, phi2 })
    }

    /// Rectangle of type `θ`: `(θ, π, π)`.
    pub fn rectangle(theta: f64) -> Result<Self> {
        Self::new(theta, PI, PI)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }

    /// Angles of the four vertices about the center, measured from `v`.
    pub fn vertex_angles(&self) -> [f64; 4] {
        [0.0, self.theta, self.phi1, self.phi2 + self.theta]
    }
}

impl TryFrom<[f64; 3]> for AngleTriple {
    type Error = Error;

    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::new(a[0], a[1], a[2])
    }
}

impl From<AngleTriple> for [f64; 3] {
    fn from(t: AngleTriple) -> Self {
        [t.theta, t.phi1, t.phi2]
    }
}

/// Center `x` and radial vector `v` of a geodesic circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CirclePair {
    center: SurfacePoint,
    radial: TangentVector,
}

impl CirclePair {
    pub fn new(radial: TangentVector) -> Result<Self> {
        let r = radial.norm();
        if !(r > 0.0) {
            return Err(Error::ZeroVector);
        }
        if radial.surface() == Surface::Spherical && r >= PI / 2.0 {
            return Err(Error::InvalidRadius(r));
        }
        Ok(Self {
            center: *radial.base(),
            radial,
        })
    }

    pub(crate) fn from_raw(surface: Surface, x: Vec3, v: Vec3) -> Self {
        let center = SurfacePoint::from_raw(surface, x);
        Self {
            center,
            radial: TangentVector::project(center, v),
        }
    }

    pub fn center(&self) -> &SurfacePoint {
        &self.center
    }

    pub fn radial(&self) -> &TangentVector {
        &self.radial
    }

    pub fn radius(&self) -> f64 {
        self.radial.norm()
    }

    pub fn surface(&self) -> Surface {
        self.center.surface()
    }

    /// `exp(x, e^{i·angle} v)`.
    pub fn point_at(&self, angle: f64) -> SurfacePoint {
        let s = self.surface();
        let x = self.center.coords();
        let w = s.rotate(x, self.radial.vec(), angle);
        SurfacePoint::from_raw(s, s.exp(x, &w))
    }
}

fn check_phi(name: &'static str, phi: f64) -> Result<()> {
    if !(phi > 0.0 && phi < TAU) {
        return Err(Error::InvalidAngle {
            name,
            value: phi,
            reason: "must lie in (0, 2 pi)",
        });
    }
    Ok(())
}

/// `F_φ(x, v) = (exp(x, v), exp(x, e^{iφ} v))`.
pub fn f_phi(cp: &CirclePair, phi: f64) -> Result<(SurfacePoint, SurfacePoint)> {
    check_phi("phi", phi)?;
    Ok((cp.point_at(0.0), cp.point_at(phi)))
}

/// The unique circle pair with `F_φ(x, v) = (p, q)`.
///
/// The radius comes from the isosceles relation `sinh r = sinh(d/2) / sin(φ/2)`
/// (spherical: `sin r = sin(d/2) / sin(φ/2)`, flat: `r = (d/2) / sin(φ/2)`); the
/// center sits on the perpendicular bisector of `pq` at signed height `h` with
/// `tanh h = tanh r · cos(φ/2)`. Both sides of `pq` are tested against the
/// oriented angle `∠(log_x p → log_x q) = φ`.
pub fn f_phi_inverse(p: &SurfacePoint, q: &SurfacePoint, phi: f64) -> Result<CirclePair> {
    if p.surface() != q.surface() {
        return Err(Error::SurfaceMismatch(p.surface(), q.surface()));
    }
    check_phi("phi", phi)?;
    let s = p.surface();
    let (x, v) = f_phi_inverse_raw(s, p.coords(), q.coords(), phi)?;
    Ok(CirclePair::from_raw(s, x, v))
}

pub(crate) fn f_phi_inverse_raw(s: Surface, p: &Vec3, q: &Vec3, phi: f64) -> Result<(Vec3, Vec3)> {
    let d = s.dist(p, q);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let half_sin = (phi / 2.0).sin();
    let half_cos = (phi / 2.0).cos();
    let (r, m) = match s {
        Surface::Hyperbolic => {
            let r = ((d / 2.0).sinh() / half_sin).asinh();
            let sum = p + q;
            let m = sum / (-s.inner(&sum, &sum)).sqrt();
            (r, s.project_point(&m))
        }
        Surface::Spherical => {
            let sum = p + q;
            if sum.norm() < 1e-12 || d >= PI - 1e-12 {
                return Err(Error::Antipodal);
            }
            let ratio = (d / 2.0).sin() / half_sin;
            if ratio >= 1.0 {
                return Err(Error::NoCircle(
                    "spherical pair needs a radius of at least pi/2 for this angle",
                ));
            }
            (ratio.asin(), s.project_point(&sum))
        }
        Surface::Euclidean => (d / 2.0 / half_sin, (p + q) / 2.0),
    };
    let diff = q - p;
    let toward_q = s.project_tangent(&m, &diff);
    let toward_q = toward_q / s.norm(&toward_q);
    let normal = s.rotate90(&m, &toward_q);
    let h = match s {
        Surface::Hyperbolic => (r.tanh() * half_cos).atanh(),
        Surface::Spherical => (r.tan() * half_cos).atan(),
        Surface::Euclidean => r * half_cos,
    };

    let scale = 1.0 + m.norm();
    let tol = ORIENTATION_TOLERANCE.max(256.0 * f64::EPSILON * scale / s.jacobi_odd(r));
    let residual = |h: f64| -> Result<(f64, Vec3, Vec3)> {
        let x = s.exp(&m, &(normal * h));
        let vp = s.log(&x, p)?;
        let vq = s.log(&x, q)?;
        let angle = s.oriented_angle(&x, &vp, &vq);
        Ok((wrap_signed(angle - phi), x, vp))
    };
    // Secant iterations on the bisector height, never crossing to the other
    // side. The closed form is already accurate to roundoff, so a candidate far
    // from the target angle is the mirror image and is not refined.
    let refine = |h0: f64| -> Result<Option<(Vec3, Vec3)>> {
        let (g0, x, v) = residual(h0)?;
        if g0.abs() <= tol {
            return Ok(Some((x, v)));
        }
        if g0.abs() > 1e-6 {
            return Ok(None);
        }
        let (mut a, mut ga) = (h0, g0);
        let mut b = h0 * (1.0 + 1e-6) + 1e-9 * h0.signum();
        for _ in 0..30 {
            let (gb, xb, vb) = residual(b)?;
            if gb.abs() <= tol {
                return Ok(Some((xb, vb)));
            }
            let denom = gb - ga;
            if denom == 0.0 {
                break;
            }
            let next = b - gb * (b - a) / denom;
            if !next.is_finite() || next.signum() != h0.signum() {
                break;
            }
            (a, ga, b) = (b, gb, next);
        }
        Ok(None)
    };

    if h.abs() <= 1e-12 * (1.0 + r) {
        // The two candidates coincide: the pair is (numerically) a diameter.
        let (g, x, v) = residual(h)?;
        if g.abs() <= tol.max(1e-9) {
            return Ok((x, v));
        }
        return Err(Error::NoCircle("diameter construction failed"));
    }
    let near = refine(h)?;
    let far = refine(-h)?;
    match (near, far) {
        (Some(c), None) | (None, Some(c)) => Ok(c),
        (Some(a), Some(b)) => {
            if (a.0 - b.0).amax() <= 1e-9 * scale {
                Ok(a)
            } else {
                Err(Error::NoCircle("both orientations qualify"))
            }
        }
        (None, None) => Err(Error::NoCircle("orientation refinement failed")),
    }
}

/// Raw result of the quadrilateral map: center, radial vector and the images.
#[derive(Clone, Copy, Debug)]
pub(crate) struct QuadRaw {
    pub x: Vec3,
    pub v: Vec3,
    pub p2: Vec3,
    pub q2: Vec3,
}

pub(crate) fn quad_map_raw(s: Surface, p: &Vec3, q: &Vec3, t: &AngleTriple) -> Result<QuadRaw> {
    let d = s.dist(p, q);
    if d < NEAR_DIAGONAL_GUARD {
        return Err(Error::NearDiagonal {
            distance: d,
            guard: NEAR_DIAGONAL_GUARD,
        });
    }
    let (x, v) = f_phi_inverse_raw(s, p, q, t.phi1)?;
    let p2 = s.exp(&x, &s.rotate(&x, &v, t.theta));
    let q2 = s.exp(&x, &s.rotate(&x, &v, t.theta + t.phi2));
    Ok(QuadRaw { x, v, p2, q2 })
}

/// Image of `(p, q)` under the quadrilateral map, with the circle through all four points.
#[derive(Clone, Copy, Debug)]
pub struct QuadImage {
    pub circle: CirclePair,
    pub p_prime: SurfacePoint,
    pub q_prime: SurfacePoint,
}

pub fn quad_map_with_circle(p: &SurfacePoint, q: &SurfacePoint, t: &AngleTriple) -> Result<QuadImage> {
    if p.surface() != q.surface() {
        return Err(Error::SurfaceMismatch(p.surface(), q.surface()));
    }
    let s = p.surface();
    let raw = quad_map_raw(s, p.coords(), q.coords(), t)?;
    Ok(QuadImage {
        circle: CirclePair::from_raw(s, raw.x, raw.v),
        p_prime: SurfacePoint::from_raw(s, raw.p2),
        q_prime: SurfacePoint::from_raw(s, raw.q2),
    })
}

/// `(p′, q′) = F_{φ2}(R_θ(F_{φ1}⁻¹(p, q)))`.
pub fn quad_map(p: &SurfacePoint, q: &SurfacePoint, t: &AngleTriple) -> Result<(SurfacePoint, SurfacePoint)> {
    let img = quad_map_with_circle(p, q, t)?;
    Ok((img.p_prime, img.q_prime))
}

/// Inverse motion `F_{φ1} ∘ R_{-θ} ∘ F_{φ2}⁻¹`.
pub fn quad_map_inverse(
    p_prime: &SurfacePoint,
    q_prime: &SurfacePoint,
    t: &AngleTriple,
) -> Result<(SurfacePoint, SurfacePoint)> {
    let d = distance_checked(p_prime, q_prime)?;
    if d < NEAR_DIAGONAL_GUARD {
        return Err(Error::NearDiagonal {
            distance: d,
            guard: NEAR_DIAGONAL_GUARD,
        });
    }
    let rotated = f_phi_inverse(p_prime, q_prime, t.phi2)?;
    let s = rotated.surface();
    let x = rotated.center().coords();
    let v = s.rotate(x, rotated.radial().vec(), -t.theta);
    let cp = CirclePair::from_raw(s, *x, v);
    f_phi(&cp, t.phi1)
}

fn distance_checked(p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    crate::geometry::distance(p, q)
}

/// The vertices `(p1, p2, p3, p4)` at angles `(0, θ, φ1, φ2 + θ)` about the center.
pub fn quad_vertices(cp: &CirclePair, t: &AngleTriple) -> [SurfacePoint; 4] {
    t.vertex_angles().map(|a| cp.point_at(a))
}

/// Complex factors by which the differential of the quadrilateral map acts on
/// the anti-diagonal direction `(w, -w)` at a diagonal point:
/// `(1 + e^{iφ1} - 2e^{iθ}) / (e^{iφ1} - 1)` and
/// `(1 + e^{iφ1} - 2e^{i(θ+φ2)}) / (e^{iφ1} - 1)`.
pub fn diagonal_multipliers(theta: f64, phi1: f64, phi2: f64) -> Result<(Complex64, Complex64)> {
    let e1 = Complex64::from_polar(1.0, phi1);
    let denom = e1 - 1.0;
    if denom.norm() < 1e-12 {
        return Err(Error::InvalidAngle {
            name: "phi1",
            value: phi1,
            reason: "must not be a multiple of 2 pi",
        });
    }
    let one = Complex64::new(1.0, 0.0);
    let first = (one + e1 - Complex64::from_polar(2.0, theta)) / denom;
    let second = (one + e1 - Complex64::from_polar(2.0, theta + phi2)) / denom;
    Ok((first, second))
}
