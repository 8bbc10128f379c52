//! Constant-curvature surface primitives.
//!
//! Every surface is stored in embedding coordinates in ℝ³:
//!
//! * `Hyperbolic` is the upper sheet of the hyperboloid `⟨p,p⟩ = -1`, `p₀ > 0`,
//!   with the Minkowski form `⟨a,b⟩ = -a₀b₀ + a₁b₁ + a₂b₂`.
//! * `Spherical` is the unit sphere with the Euclidean dot product.
//! * `Euclidean` is the plane `z = 0`.
//!
//! The complex structure `j` rotates each tangent plane by +90°. On the sphere it
//! is `w ↦ p × w` (outward normal, right-hand rule); on the hyperboloid it is the
//! Lorentzian cross product `w ↦ p ⊠ w`, which agrees with the counterclockwise
//! rotation of the Poincaré disk; on the plane it is `(x, y) ↦ (-y, x)`.
//!
//! The `Surface` methods operate on raw coordinates and skip validation; they
//! back the typed functions in this module and the solver's inner loops.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Tolerance accepted on input coordinates before they are renormalized.
pub const INPUT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Surface {
    #[serde(alias = "hyperbolic-plane")]
    Hyperbolic,
    #[serde(alias = "sphere")]
    Spherical,
    #[serde(alias = "plane")]
    Euclidean,
}

/// `sinh(r) / r`, stable near zero.
pub(crate) fn sinhc(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        1.0 + r * r / 6.0
    } else {
        r.sinh() / r
    }
}

/// `sin(r) / r`, stable near zero.
pub(crate) fn sinc(r: f64) -> f64 {
    if r.abs() < 1e-4 {
        1.0 - r * r / 6.0
    } else {
        r.sin() / r
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_signed(a: f64) -> f64 {
    let w = wrap_angle(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

impl Surface {
    pub fn curvature(self) -> f64 {
        match self {
            Surface::Hyperbolic => -1.0,
            Surface::Spherical => 1.0,
            Surface::Euclidean => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Surface::Hyperbolic => "hyperbolic",
            Surface::Spherical => "spherical",
            Surface::Euclidean => "euclidean",
        }
    }

    /// Ambient bilinear form restricting to the metric on tangent vectors.
    #[inline]
    pub fn inner(self, a: &Vec3, b: &Vec3) -> f64 {
        match self {
            Surface::Hyperbolic => -a.x * b.x + a.y * b.y + a.z * b.z,
            Surface::Spherical | Surface::Euclidean => a.dot(b),
        }
    }

    /// Length of a tangent vector.
    #[inline]
    pub fn norm(self, v: &Vec3) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Base point of the model: `(1,0,0)`, the north pole, or the plane origin.
    pub fn origin_coords(self) -> Vec3 {
        match self {
            Surface::Hyperbolic => Vec3::new(1.0, 0.0, 0.0),
            Surface::Spherical => Vec3::new(0.0, 0.0, 1.0),
            Surface::Euclidean => Vec3::zeros(),
        }
    }

    /// Positively oriented orthonormal frame at the origin.
    pub fn origin_frame(self) -> (Vec3, Vec3) {
        match self {
            Surface::Hyperbolic => (Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)),
            Surface::Spherical | Surface::Euclidean => (Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)),
        }
    }

    /// Projects near-surface coordinates back onto the model.
    #[inline]
    pub fn project_point(self, c: &Vec3) -> Vec3 {
        match self {
            Surface::Hyperbolic => Vec3::new((1.0 + c.y * c.y + c.z * c.z).sqrt(), c.y, c.z),
            Surface::Spherical => c / c.norm(),
            Surface::Euclidean => Vec3::new(c.x, c.y, 0.0),
        }
    }

    /// Orthogonal projection of an ambient vector onto the tangent plane at `p`.
    #[inline]
    pub fn project_tangent(self, p: &Vec3, w: &Vec3) -> Vec3 {
        match self {
            Surface::Hyperbolic => w + p * self.inner(p, w),
            Surface::Spherical => w - p * p.dot(w),
            Surface::Euclidean => Vec3::new(w.x, w.y, 0.0),
        }
    }

    /// The complex structure `j` at `p`.
    #[inline]
    pub fn rotate90(self, p: &Vec3, w: &Vec3) -> Vec3 {
        match self {
            Surface::Hyperbolic => {
                let c = p.cross(w);
                Vec3::new(-c.x, c.y, c.z)
            }
            Surface::Spherical => p.cross(w),
            Surface::Euclidean => Vec3::new(-w.y, w.x, 0.0),
        }
    }

    /// `cos(a)·w + sin(a)·j w`.
    #[inline]
    pub fn rotate(self, p: &Vec3, w: &Vec3, angle: f64) -> Vec3 {
        let (s, c) = angle.sin_cos();
        w * c + self.rotate90(p, w) * s
    }

    #[inline]
    pub fn exp(self, x: &Vec3, v: &Vec3) -> Vec3 {
        match self {
            Surface::Hyperbolic => {
                let r = self.norm(v);
                self.project_point(&(x * r.cosh() + v * sinhc(r)))
            }
            Surface::Spherical => {
                let r = v.norm();
                self.project_point(&(x * r.cos() + v * sinc(r)))
            }
            Surface::Euclidean => Vec3::new(x.x + v.x, x.y + v.y, 0.0),
        }
    }

    #[inline]
    pub fn dist(self, p: &Vec3, q: &Vec3) -> f64 {
        match self {
            Surface::Hyperbolic => {
                let w = p - q;
                2.0 * (self.norm(&w) / 2.0).asinh()
            }
            Surface::Spherical => p.cross(q).norm().atan2(p.dot(q)),
            Surface::Euclidean => (p - q).norm(),
        }
    }

    /// Monotone stand-in for distance that avoids transcendental functions:
    /// `cosh d`, `-cos d`, or `d²`.
    #[inline]
    pub fn closeness(self, p: &Vec3, q: &Vec3) -> f64 {
        match self {
            Surface::Hyperbolic => -self.inner(p, q),
            Surface::Spherical => -p.dot(q),
            Surface::Euclidean => (p - q).norm_squared(),
        }
    }

    #[inline]
    pub fn log(self, x: &Vec3, p: &Vec3) -> Result<Vec3> {
        let w = p - x;
        match self {
            Surface::Euclidean => Ok(Vec3::new(w.x, w.y, 0.0)),
            Surface::Hyperbolic | Surface::Spherical => {
                let u = self.project_tangent(x, &w);
                let n = self.norm(&u);
                if self == Surface::Spherical && x.dot(p) < 0.0 && n < 1e-12 {
                    return Err(Error::Antipodal);
                }
                if n == 0.0 {
                    return Ok(Vec3::zeros());
                }
                Ok(u * (self.dist(x, p) / n))
            }
        }
    }

    /// Unit velocity at `exp(x, v)` of the geodesic `t ↦ exp(x, t v)`.
    #[inline]
    pub fn geodesic_velocity(self, x: &Vec3, v: &Vec3) -> Vec3 {
        let r = self.norm(v);
        let dir = v / r;
        match self {
            Surface::Hyperbolic => x * r.sinh() + dir * r.cosh(),
            Surface::Spherical => -x * r.sin() + dir * r.cos(),
            Surface::Euclidean => dir,
        }
    }

    /// Oriented angle in `[0, 2π)` from `a` to `b`, both tangent at `x`.
    #[inline]
    pub fn oriented_angle(self, x: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
        let ja = self.rotate90(x, a);
        wrap_angle(self.inner(&ja, b).atan2(self.inner(a, b)))
    }

    /// Growth of an orthogonal Jacobi field with vanishing initial derivative:
    /// `cosh r`, `cos r`, or `1`.
    #[inline]
    pub fn jacobi_even(self, r: f64) -> f64 {
        match self {
            Surface::Hyperbolic => r.cosh(),
            Surface::Spherical => r.cos(),
            Surface::Euclidean => 1.0,
        }
    }

    /// Radius of the circle of geodesic radius `r`: `sinh r`, `sin r`, or `r`.
    #[inline]
    pub fn jacobi_odd(self, r: f64) -> f64 {
        match self {
            Surface::Hyperbolic => r.sinh(),
            Surface::Spherical => r.sin(),
            Surface::Euclidean => r,
        }
    }

    fn check_coords(self, c: &Vec3, tol: f64) -> Result<()> {
        let fail = |reason: String| Error::NotOnSurface { surface: self, reason };
        if !c.iter().all(|v| v.is_finite()) {
            return Err(fail("non-finite coordinate".into()));
        }
        match self {
            Surface::Hyperbolic => {
                if c.x <= 0.0 {
                    return Err(fail("not on the upper sheet".into()));
                }
                let dev = (self.inner(c, c) + 1.0).abs();
                if dev > tol * (1.0 + c.norm_squared()) {
                    return Err(fail(format!("Minkowski norm deviates by {dev:e}")));
                }
            }
            Surface::Spherical => {
                let dev = (c.norm_squared() - 1.0).abs();
                if dev > tol {
                    return Err(fail(format!("norm deviates by {dev:e}")));
                }
            }
            Surface::Euclidean => {
                if c.z.abs() > tol {
                    return Err(fail(format!("z = {}", c.z)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfacePoint {
    surface: Surface,
    coords: Vec3,
}

impl SurfacePoint {
    /// Accepts coordinates within [`INPUT_TOLERANCE`] of the model and renormalizes.
    pub fn new(surface: Surface, coords: Vec3) -> Result<Self> {
        surface.check_coords(&coords, INPUT_TOLERANCE)?;
        Ok(Self::from_raw(surface, coords))
    }

    /// Projects arbitrary coordinates onto the model. Fails only when no
    /// projection exists (non-finite input, the zero vector on the sphere, or a
    /// point on the lower sheet).
    pub fn project(surface: Surface, coords: Vec3) -> Result<Self> {
        if !coords.iter().all(|v| v.is_finite()) {
            return Err(Error::NotOnSurface {
                surface,
                reason: "non-finite coordinate".into(),
            });
        }
        match surface {
            Surface::Spherical if coords.norm() == 0.0 => Err(Error::NotOnSurface {
                surface,
                reason: "zero vector has no projection".into(),
            }),
            Surface::Hyperbolic if coords.x <= 0.0 => Err(Error::NotOnSurface {
                surface,
                reason: "not on the upper sheet".into(),
            }),
            _ => Ok(Self::from_raw(surface, coords)),
        }
    }

    pub(crate) fn from_raw(surface: Surface, coords: Vec3) -> Self {
        Self {
            surface,
            coords: surface.project_point(&coords),
        }
    }

    pub fn origin(surface: Surface) -> Self {
        Self {
            surface,
            coords: surface.origin_coords(),
        }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn coords(&self) -> &Vec3 {
        &self.coords
    }

    pub fn distance(&self, other: &SurfacePoint) -> Result<f64> {
        distance(self, other)
    }

    fn same_point(&self, other: &SurfacePoint) -> bool {
        let scale = 1.0 + self.coords.norm().max(other.coords.norm());
        (self.coords - other.coords).amax() <= 1e-12 * scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    base: SurfacePoint,
    vec: Vec3,
}

impl TangentVector {
    /// Accepts a vector within [`INPUT_TOLERANCE`] of the tangent plane and
    /// projects it exactly onto it.
    pub fn new(base: SurfacePoint, vec: Vec3) -> Result<Self> {
        if !vec.iter().all(|v| v.is_finite()) {
            return Err(Error::NotTangent {
                deviation: f64::INFINITY,
            });
        }
        let s = base.surface;
        let deviation = match s {
            Surface::Euclidean => vec.z.abs(),
            _ => s.inner(&base.coords, &vec).abs(),
        };
        if deviation > INPUT_TOLERANCE * (1.0 + vec.norm() * base.coords.norm()) {
            return Err(Error::NotTangent { deviation });
        }
        Ok(Self::project(base, vec))
    }

    pub fn project(base: SurfacePoint, vec: Vec3) -> Self {
        Self {
            base,
            vec: base.surface.project_tangent(&base.coords, &vec),
        }
    }

    pub fn zero(base: SurfacePoint) -> Self {
        Self {
            base,
            vec: Vec3::zeros(),
        }
    }

    pub fn base(&self) -> &SurfacePoint {
        &self.base
    }

    pub fn vec(&self) -> &Vec3 {
        &self.vec
    }

    pub fn surface(&self) -> Surface {
        self.base.surface
    }

    pub fn norm(&self) -> f64 {
        self.surface().norm(&self.vec)
    }

    pub fn inner(&self, other: &TangentVector) -> f64 {
        self.surface().inner(&self.vec, &other.vec)
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            base: self.base,
            vec: self.vec * f,
        }
    }

    pub fn neg(&self) -> Self {
        self.scaled(-1.0)
    }

    /// Sum of two vectors at the same base point.
    pub fn add(&self, other: &TangentVector) -> Result<Self> {
        if !self.base.same_point(&other.base) {
            return Err(Error::BaseMismatch);
        }
        Ok(Self {
            base: self.base,
            vec: self.vec + other.vec,
        })
    }

    /// `j v`.
    pub fn rotate90(&self) -> Self {
        Self {
            base: self.base,
            vec: self.surface().rotate90(&self.base.coords, &self.vec),
        }
    }

    pub fn unit(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(self.scaled(1.0 / n))
    }
}

/// Orthonormal frame `(e1, e2 = j e1)` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameAtPoint {
    pub base: SurfacePoint,
    pub e1: TangentVector,
    pub e2: TangentVector,
}

impl FrameAtPoint {
    pub fn new(direction: &TangentVector) -> Result<Self> {
        let e1 = direction.unit()?;
        Ok(Self {
            base: e1.base,
            e1,
            e2: e1.rotate90(),
        })
    }

    pub fn standard(surface: Surface) -> Self {
        let base = SurfacePoint::origin(surface);
        let (e1, e2) = surface.origin_frame();
        Self {
            base,
            e1: TangentVector { base, vec: e1 },
            e2: TangentVector { base, vec: e2 },
        }
    }

    /// `a·e1 + b·e2`.
    pub fn vector(&self, a: f64, b: f64) -> TangentVector {
        TangentVector {
            base: self.base,
            vec: self.e1.vec * a + self.e2.vec * b,
        }
    }

    /// Coordinates of `v` in this frame.
    pub fn components(&self, v: &TangentVector) -> (f64, f64) {
        (v.inner(&self.e1), v.inner(&self.e2))
    }
}

fn same_surface(a: Surface, b: Surface) -> Result<()> {
    if a != b {
        return Err(Error::SurfaceMismatch(a, b));
    }
    Ok(())
}

fn check_base(x: &SurfacePoint, v: &TangentVector) -> Result<()> {
    same_surface(x.surface, v.surface())?;
    if !x.same_point(&v.base) {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// Point at arc length `‖v‖` along the geodesic leaving `x` with velocity `v`.
pub fn exp_map(x: &SurfacePoint, v: &TangentVector) -> Result<SurfacePoint> {
    check_base(x, v)?;
    let s = x.surface;
    if s == Surface::Spherical {
        let r = v.norm();
        if r >= PI {
            return Err(Error::BeyondInjectivity(r));
        }
    }
    Ok(SurfacePoint {
        surface: s,
        coords: s.exp(&x.coords, &v.vec),
    })
}

/// Inverse of [`exp_map`]; fails on antipodal spherical pairs.
pub fn log_map(x: &SurfacePoint, p: &SurfacePoint) -> Result<TangentVector> {
    same_surface(x.surface, p.surface)?;
    let vec = x.surface.log(&x.coords, &p.coords)?;
    Ok(TangentVector { base: *x, vec })
}

pub fn distance(p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
    same_surface(p.surface, q.surface)?;
    Ok(p.surface.dist(&p.coords, &q.coords))
}

/// `e^{i·angle}·v` in the oriented tangent plane.
pub fn rotate_tangent(v: &TangentVector, angle: f64) -> TangentVector {
    TangentVector {
        base: v.base,
        vec: v.surface().rotate(&v.base.coords, &v.vec, angle),
    }
}

/// Length of the geodesic circle of radius `r`.
pub fn circle_circumference(r: f64, surface: Surface) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidRadius(r));
    }
    if surface == Surface::Spherical && r >= PI {
        return Err(Error::InvalidRadius(r));
    }
    Ok(TAU * surface.jacobi_odd(r))
}

/// Unit velocity `w_p` at `exp(x, v)` of the radial geodesic.
pub fn geodesic_velocity(v: &TangentVector) -> Result<TangentVector> {
    if v.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let s = v.surface();
    let x = &v.base.coords;
    let p = SurfacePoint {
        surface: s,
        coords: s.exp(x, &v.vec),
    };
    Ok(TangentVector::project(p, s.geodesic_velocity(x, &v.vec)))
}

/// Differential of `exp` along a horizontal perturbation `w` of the base point
/// (the base moves along `w` and `v` is parallel transported with it).
///
/// The radial part of `w` maps to the unit velocity `w_p`; the orthogonal part
/// is scaled by `cosh‖v‖` (hyperbolic), `cos‖v‖` (spherical) or `1` and rotated
/// to `j w_p`. The spherical map is singular at `‖v‖ = π/2`.
pub fn d_exp(x: &SurfacePoint, v: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
    check_base(x, v)?;
    check_base(x, w)?;
    let s = x.surface;
    let r = v.norm();
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    let dir = v.vec / r;
    let jdir = s.rotate90(&x.coords, &dir);
    let along = s.inner(&w.vec, &dir);
    let across = s.inner(&w.vec, &jdir);
    let p = s.exp(&x.coords, &v.vec);
    let wp = s.project_tangent(&p, &s.geodesic_velocity(&x.coords, &v.vec));
    let jwp = s.rotate90(&p, &wp);
    Ok(TangentVector {
        base: SurfacePoint { surface: s, coords: p },
        vec: wp * along + jwp * (across * s.jacobi_even(r)),
    })
}

/// Parallel transport of `w` (based at `v.base()`) along `t ↦ exp(t v)`, `t ∈ [0, 1]`.
pub fn parallel_transport(v: &TangentVector, w: &TangentVector) -> Result<TangentVector> {
    same_surface(v.surface(), w.surface())?;
    if !v.base.same_point(&w.base) {
        return Err(Error::BaseMismatch);
    }
    let s = v.surface();
    let x = &v.base.coords;
    let p = SurfacePoint {
        surface: s,
        coords: s.exp(x, &v.vec),
    };
    let r = v.norm();
    if r == 0.0 {
        return Ok(TangentVector { base: p, vec: w.vec });
    }
    let dir = v.vec / r;
    let jdir = s.rotate90(x, &dir);
    let along = s.inner(&w.vec, &dir);
    let across = s.inner(&w.vec, &jdir);
    let vel = s.project_tangent(&p.coords, &s.geodesic_velocity(x, &v.vec));
    let jvel = s.rotate90(&p.coords, &vel);
    Ok(TangentVector {
        base: p,
        vec: vel * along + jvel * across,
    })
}

/// Oriented angle in `[0, 2π)` from `a` to `b`.
pub fn oriented_angle(a: &TangentVector, b: &TangentVector) -> Result<f64> {
    same_surface(a.surface(), b.surface())?;
    if !a.base.same_point(&b.base) {
        return Err(Error::BaseMismatch);
    }
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(a.surface().oriented_angle(&a.base.coords, &a.vec, &b.vec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_point, random_tangent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const SURFACES: [Surface; 3] = [Surface::Hyperbolic, Surface::Spherical, Surface::Euclidean];

    fn tangent_at_origin(s: Surface, a: f64, b: f64) -> TangentVector {
        FrameAtPoint::standard(s).vector(a, b)
    }

    #[test]
    fn exp_at_hyperboloid_origin() {
        let x = SurfacePoint::origin(Surface::Hyperbolic);
        let t = 0.7;
        let p = exp_map(&x, &tangent_at_origin(Surface::Hyperbolic, t, 0.0)).unwrap();
        let want = Vec3::new(t.cosh(), t.sinh(), 0.0);
        assert!((p.coords() - want).amax() < 1e-15);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for s in SURFACES {
            let x = random_point(s, &mut rng, 1.0);
            let p = exp_map(&x, &TangentVector::zero(x)).unwrap();
            assert!((p.coords() - x.coords()).amax() < 1e-15);
        }
    }

    #[test]
    fn quarter_great_circle_lands_on_equator() {
        let x = SurfacePoint::origin(Surface::Spherical);
        let v = tangent_at_origin(Surface::Spherical, 0.3, -0.4).unit().unwrap();
        let p = exp_map(&x, &v.scaled(PI / 2.0)).unwrap();
        assert!(p.coords().z.abs() < 1e-15);
        assert!((distance(&x, &p).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exp_rejects_bad_input() {
        let x = SurfacePoint::origin(Surface::Spherical);
        let v = tangent_at_origin(Surface::Spherical, PI, 0.0);
        assert!(matches!(exp_map(&x, &v), Err(Error::BeyondInjectivity(_))));
        let other = SurfacePoint::new(Surface::Spherical, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let w = TangentVector::zero(other);
        assert_eq!(exp_map(&x, &w), Err(Error::BaseMismatch));
    }

    #[test]
    fn log_examples() {
        let x = SurfacePoint::origin(Surface::Hyperbolic);
        let v = log_map(&x, &x).unwrap();
        assert_eq!(v.norm(), 0.0);
        let p = SurfacePoint::new(Surface::Hyperbolic, Vec3::new(1f64.cosh(), 1f64.sinh(), 0.0)).unwrap();
        let v = log_map(&x, &p).unwrap();
        assert!((v.vec() - Vec3::new(0.0, 1.0, 0.0)).amax() < 1e-15);
    }

    #[test]
    fn log_rejects_antipodes() {
        let n = SurfacePoint::origin(Surface::Spherical);
        let s = SurfacePoint::new(Surface::Spherical, Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(log_map(&n, &s), Err(Error::Antipodal));
    }

    #[test]
    fn distance_examples() {
        let n = SurfacePoint::origin(Surface::Spherical);
        let e = SurfacePoint::new(Surface::Spherical, Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let s = SurfacePoint::new(Surface::Spherical, Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert_eq!(distance(&n, &n).unwrap(), 0.0);
        assert!((distance(&n, &e).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((distance(&n, &s).unwrap() - PI).abs() < 1e-15);
        let h = SurfacePoint::origin(Surface::Hyperbolic);
        assert_eq!(
            distance(&n, &h),
            Err(Error::SurfaceMismatch(Surface::Spherical, Surface::Hyperbolic))
        );
    }

    #[test]
    fn rotate_tangent_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for s in SURFACES {
            let x = random_point(s, &mut rng, 1.5);
            let v = random_tangent(&x, &mut rng, 2.0);
            let same = rotate_tangent(&v, 0.0);
            assert!((same.vec() - v.vec()).amax() < 1e-15);
            let flipped = rotate_tangent(&v, PI);
            assert!((flipped.vec() + v.vec()).amax() < 1e-14);
            let full = rotate_tangent(&v, TAU);
            assert!((full.vec() - v.vec()).amax() < 1e-14);
            let r = rotate_tangent(&v, 1.234);
            assert!((r.norm() - v.norm()).abs() < 1e-14);
        }
    }

    #[test]
    fn j_is_a_complex_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in SURFACES {
            for _ in 0..50 {
                let x = random_point(s, &mut rng, 2.0);
                let v = random_tangent(&x, &mut rng, 2.0);
                let jv = v.rotate90();
                assert!(jv.inner(&v).abs() < 1e-12);
                assert!((jv.norm() - v.norm()).abs() < 1e-12);
                let jjv = jv.rotate90();
                assert!((jjv.vec() + v.vec()).amax() < 1e-12 * (1.0 + x.coords().norm_squared()));
                let tangency = s.inner(x.coords(), jv.vec());
                assert!(s == Surface::Euclidean || tangency.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hyperbolic_j_matches_disk_orientation() {
        // At the origin the disk chart is the identity on (y, z) to first order.
        let f = FrameAtPoint::standard(Surface::Hyperbolic);
        let je1 = f.e1.rotate90();
        assert!((je1.vec() - Vec3::new(0.0, 0.0, 1.0)).amax() < 1e-15);
    }

    #[test]
    fn circumference_matches_polygon_length() {
        for s in SURFACES {
            for r in [0.2, 1.0, 1.4] {
                let x = SurfacePoint::origin(s);
                let v = FrameAtPoint::standard(s).vector(r, 0.0);
                let length = |n: usize| {
                    let pts: Vec<Vec3> = (0..=n)
                        .map(|k| s.exp(x.coords(), rotate_tangent(&v, TAU * k as f64 / n as f64).vec()))
                        .collect();
                    pts.windows(2).map(|w| s.dist(&w[0], &w[1])).sum::<f64>()
                };
                let extrapolated = (4.0 * length(4000) - length(2000)) / 3.0;
                let exact = circle_circumference(r, s).unwrap();
                assert!((extrapolated - exact).abs() < 1e-8 * exact, "{s:?} {r}");
            }
        }
    }

    #[test]
    fn circumference_values() {
        let h = circle_circumference(1.0, Surface::Hyperbolic).unwrap();
        assert!((h - TAU * 1f64.sinh()).abs() < 1e-14);
        assert!((h - 7.384_006_872_882_645).abs() < 1e-12);
        let e = circle_circumference(PI / 2.0, Surface::Spherical).unwrap();
        assert!((e - TAU).abs() < 1e-14);
        for s in SURFACES {
            let r = 1e-3;
            let c = circle_circumference(r, s).unwrap();
            assert!((c - TAU * r).abs() < 2e-9);
        }
        assert!(circle_circumference(0.0, Surface::Euclidean).is_err());
        assert!(circle_circumference(-1.0, Surface::Hyperbolic).is_err());
        assert!(circle_circumference(PI, Surface::Spherical).is_err());
    }

    #[test]
    fn d_exp_radial_direction_is_geodesic_velocity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in SURFACES {
            let x = random_point(s, &mut rng, 1.0);
            let v = random_tangent(&x, &mut rng, 1.5);
            let d = d_exp(&x, &v, &v.unit().unwrap()).unwrap();
            let wp = geodesic_velocity(&v).unwrap();
            assert!((d.vec() - wp.vec()).amax() < 1e-13);
            assert!((wp.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn d_exp_orthogonal_scales_by_cosh() {
        let x = SurfacePoint::origin(Surface::Hyperbolic);
        let v = tangent_at_origin(Surface::Hyperbolic, 0.6, 0.8);
        let d = d_exp(&x, &v, &v.rotate90()).unwrap();
        assert!((d.norm() - 1f64.cosh()).abs() < 1e-13);
        assert!((d.norm() - 1.543_080_6).abs() < 1e-6);
        let jwp = geodesic_velocity(&v).unwrap().rotate90();
        assert!((d.vec() - jwp.vec() * 1f64.cosh()).amax() < 1e-13);
        assert_eq!(d_exp(&x, &TangentVector::zero(x), &v), Err(Error::ZeroVector));
    }

    #[test]
    fn parallel_transport_preserves_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in SURFACES {
            let x = random_point(s, &mut rng, 1.0);
            let v = random_tangent(&x, &mut rng, 1.5);
            let a = random_tangent(&x, &mut rng, 1.0);
            let b = random_tangent(&x, &mut rng, 1.0);
            let ta = parallel_transport(&v, &a).unwrap();
            let tb = parallel_transport(&v, &b).unwrap();
            assert!((ta.inner(&tb) - a.inner(&b)).abs() < 1e-12);
            let tv = parallel_transport(&v, &v).unwrap();
            let vel = geodesic_velocity(&v).unwrap().scaled(v.norm());
            assert!((tv.vec() - vel.vec()).amax() < 1e-12);
        }
    }

    #[test]
    fn constructors_validate() {
        assert!(SurfacePoint::new(Surface::Hyperbolic, Vec3::new(-1.0, 0.0, 0.0)).is_err());
        assert!(SurfacePoint::new(Surface::Spherical, Vec3::new(0.0, 0.0, 1.1)).is_err());
        assert!(SurfacePoint::new(Surface::Euclidean, Vec3::new(0.0, 0.0, 1.0)).is_err());
        let p = SurfacePoint::project(Surface::Hyperbolic, Vec3::new(3.0, 1.0, 2.0)).unwrap();
        let q = p.coords();
        assert!((Surface::Hyperbolic.inner(q, q) + 1.0).abs() < 1e-12);
        let x = SurfacePoint::origin(Surface::Spherical);
        assert!(TangentVector::new(x, Vec3::new(0.0, 0.0, 1.0)).is_err());
        assert!(SurfacePoint::project(Surface::Spherical, Vec3::zeros()).is_err());
    }

    #[test]
    fn oriented_angle_of_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for s in SURFACES {
            let x = random_point(s, &mut rng, 1.0);
            let v = random_tangent(&x, &mut rng, 1.0);
            for a in [0.1, 1.0, 3.0, 4.0, 6.0] {
                let w = rotate_tangent(&v, a);
                assert!((oriented_angle(&v, &w).unwrap() - a).abs() < 1e-12);
            }
        }
    }
}
