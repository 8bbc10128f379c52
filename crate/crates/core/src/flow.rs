//! Hamiltonian rotation flow on pairs of points.
//!
//! The pair `(p, q)` is the pair of endpoints of a diameter of the circle
//! centered at their midpoint. The flow rotates that diameter about the
//! midpoint: `ψ_θ(p, q) = (exp(x, R_θ v), exp(x, -R_θ v))`. Its generator is
//! `f(r)·(j n_p, j n_q)`, where `n_p`, `n_q` are the unit outward directions of
//! the diameter and `f(r) = sin r`, `sinh r` or `r` for half-distance `r`.
//!
//! The Hamiltonians are `H = -4 cos(d/2)` on the sphere and `H = 4 cosh(d/2)`
//! on the hyperbolic plane. With `J` the product complex structure, `J∇H` is
//! twice the generator above, so the symplectic flow of `H` runs at angular
//! speed 2 while `ψ_θ` is parametrized by the rotation angle.

use crate::error::{Error, Result};
use crate::geometry::{Surface, SurfacePoint, TangentVector, Vec3};
use crate::quad::CirclePair;

/// Largest spherical distance the ODE integrator accepts along its path.
pub const ANTIPODAL_GUARD: f64 = 1e-6;

/// A pair of points on a common surface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairState {
    p: SurfacePoint,
    q: SurfacePoint,
}

impl PairState {
    /// Rejects mixed surfaces and antipodal spherical pairs.
    pub fn new(p: SurfacePoint, q: SurfacePoint) -> Result<Self> {
        if p.surface() != q.surface() {
            return Err(Error::SurfaceMismatch(p.surface(), q.surface()));
        }
        if p.surface() == Surface::Spherical && p.coords().dot(q.coords()) <= -1.0 + 1e-15 {
            return Err(Error::Antipodal);
        }
        Ok(Self { p, q })
    }

    pub(crate) fn from_raw(surface: Surface, p: Vec3, q: Vec3) -> Self {
        Self {
            p: SurfacePoint::from_raw(surface, p),
            q: SurfacePoint::from_raw(surface, q),
        }
    }

    pub fn p(&self) -> &SurfacePoint {
        &self.p
    }

    pub fn q(&self) -> &SurfacePoint {
        &self.q
    }

    pub fn surface(&self) -> Surface {
        self.p.surface()
    }

    pub fn swapped(&self) -> Self {
        Self { p: self.q, q: self.p }
    }

    pub fn distance(&self) -> f64 {
        self.surface().dist(self.p.coords(), self.q.coords())
    }

    pub fn is_diagonal(&self) -> bool {
        self.p.coords() == self.q.coords()
    }
}

fn require_flow_surface(s: Surface) -> Result<()> {
    match s {
        Surface::Euclidean => Err(Error::UnsupportedSurface(s)),
        _ => Ok(()),
    }
}

/// `H = -4 cos(d/2)` on the sphere, `4 cosh(d/2)` on the hyperbolic plane.
pub fn hamiltonian(state: &PairState) -> Result<f64> {
    let s = state.surface();
    require_flow_surface(s)?;
    let half = state.distance() / 2.0;
    Ok(match s {
        Surface::Spherical => -4.0 * half.cos(),
        _ => 4.0 * half.cosh(),
    })
}

/// Spherical `H` written with chordal distance in ℝ³: `-4·sqrt(1 - |z-w|²/4)`.
pub fn hamiltonian_chordal(z: &Vec3, w: &Vec3) -> f64 {
    -4.0 * (1.0 - (z - w).norm_squared() / 4.0).max(0.0).sqrt()
}

/// Midpoint `x` and half-diameter vector `v` with `exp(x, ±v) = (p, q)`.
///
/// Both are symmetric in `(p, q)` up to the sign of `v`, bit for bit.
pub(crate) fn midpoint_axis_raw(s: Surface, p: &Vec3, q: &Vec3) -> Option<(Vec3, Vec3)> {
    let diff = p - q;
    let sum = p + q;
    match s {
        Surface::Hyperbolic => {
            let c = s.norm(&diff);
            if c == 0.0 {
                return None;
            }
            let r = (c / 2.0).asinh();
            let x = s.project_point(&(sum / (-s.inner(&sum, &sum)).sqrt()));
            Some((x, s.project_tangent(&x, &diff) * (r / c)))
        }
        Surface::Spherical => {
            let c = diff.norm();
            let m = sum.norm();
            if c == 0.0 || m == 0.0 {
                return None;
            }
            let r = c.atan2(m);
            let x = sum / m;
            Some((x, s.project_tangent(&x, &diff) * (r / c)))
        }
        Surface::Euclidean => {
            if diff == Vec3::zeros() {
                return None;
            }
            Some((sum / 2.0, diff / 2.0))
        }
    }
}

/// The circle centered at the midpoint of `(p, q)` with `p` at angle 0 and `q` at angle π.
pub fn midpoint_axis(state: &PairState) -> Result<CirclePair> {
    let s = state.surface();
    let (x, v) = midpoint_axis_raw(s, state.p.coords(), state.q.coords()).ok_or(if state.is_diagonal() {
        Error::CoincidentPoints
    } else {
        Error::Antipodal
    })?;
    Ok(CirclePair::from_raw(s, x, v))
}

/// `ψ_θ(p, q)`, the rotation of the diameter `(p, q)` by `θ` about its midpoint.
/// Fixes the diagonal.
pub fn flow_closed_form(state: &PairState, theta: f64) -> Result<PairState> {
    let s = state.surface();
    require_flow_surface(s)?;
    if !theta.is_finite() {
        return Err(Error::InvalidAngle {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    if state.is_diagonal() {
        return Ok(*state);
    }
    let (x, v) = midpoint_axis_raw(s, state.p.coords(), state.q.coords()).ok_or(Error::Antipodal)?;
    let w = s.rotate(&x, &v, theta);
    Ok(PairState::from_raw(s, s.exp(&x, &w), s.exp(&x, &-w)))
}

/// Generator of `ψ` at raw coordinates.
fn field_raw(s: Surface, p: &Vec3, q: &Vec3) -> (Vec3, Vec3) {
    let Some((x, v)) = midpoint_axis_raw(s, p, q) else {
        return (Vec3::zeros(), Vec3::zeros());
    };
    let r = s.norm(&v);
    let f = s.jacobi_odd(r);
    let np = s.geodesic_velocity(&x, &v);
    let nq = s.geodesic_velocity(&x, &-v);
    (s.rotate90(p, &np) * f, s.rotate90(q, &nq) * f)
}

/// `f(r)·(j n_p, j n_q)`, the generator of [`flow_closed_form`].
pub fn vector_field(state: &PairState) -> Result<(TangentVector, TangentVector)> {
    let s = state.surface();
    require_flow_surface(s)?;
    let (a, b) = field_raw(s, state.p.coords(), state.q.coords());
    Ok((TangentVector::project(state.p, a), TangentVector::project(state.q, b)))
}

/// Analytic gradient of `H` on the product surface: `H′(d)·(∂d/∂p, ∂d/∂q)`,
/// where `∂d/∂p` is the unit vector at `p` pointing away from `q`.
pub fn hamiltonian_gradient(state: &PairState) -> Result<(TangentVector, TangentVector)> {
    let s = state.surface();
    require_flow_surface(s)?;
    let (gp, gq) = distance_sq_gradient(state)?;
    let d = state.distance();
    if d == 0.0 {
        return Ok((TangentVector::zero(state.p), TangentVector::zero(state.q)));
    }
    let half = d / 2.0;
    let slope = match s {
        Surface::Spherical => 2.0 * half.sin(),
        _ => 2.0 * half.sinh(),
    };
    Ok((gp.scaled(slope / d), gq.scaled(slope / d)))
}

/// Gradient of `d²/2`: `(-log_p q, -log_q p)`.
pub fn distance_sq_gradient(state: &PairState) -> Result<(TangentVector, TangentVector)> {
    let s = state.surface();
    let (p, q) = (state.p.coords(), state.q.coords());
    Ok((
        TangentVector::project(state.p, -s.log(p, q)?),
        TangentVector::project(state.q, -s.log(q, p)?),
    ))
}

/// Integrates the generator with fourth-order Runge–Kutta, projecting back onto
/// the surface at every stage. Uses `ceil(θ/step)` equal steps.
pub fn flow_ode(state: &PairState, theta: f64, step: f64) -> Result<PairState> {
    let s = state.surface();
    require_flow_surface(s)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::FlowDomain(format!("step must be positive, got {step}")));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidAngle {
            name: "theta",
            value: theta,
            reason: "must be finite",
        });
    }
    let n = (theta.abs() / step).ceil().max(1.0) as usize;
    let h = theta / n as f64;
    let (mut p, mut q) = (*state.p.coords(), *state.q.coords());
    let proj = |a: Vec3, b: Vec3| (s.project_point(&a), s.project_point(&b));
    for _ in 0..n {
        let (k1p, k1q) = field_raw(s, &p, &q);
        let (ap, aq) = proj(p + k1p * (h / 2.0), q + k1q * (h / 2.0));
        let (k2p, k2q) = field_raw(s, &ap, &aq);
        let (bp, bq) = proj(p + k2p * (h / 2.0), q + k2q * (h / 2.0));
        let (k3p, k3q) = field_raw(s, &bp, &bq);
        let (cp, cq) = proj(p + k3p * h, q + k3q * h);
        let (k4p, k4q) = field_raw(s, &cp, &cq);
        (p, q) = proj(
            p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0),
            q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0),
        );
        if s == Surface::Spherical && s.dist(&p, &q) > std::f64::consts::PI - ANTIPODAL_GUARD {
            return Err(Error::FlowDomain("pair reached the antipodal set".into()));
        }
    }
    Ok(PairState::from_raw(s, p, q))
}

/// Rotates the diameter `(p1, p3)` by `θ`, giving `(p2, p4)` so that
/// `p1 p2 p3 p4` is a rectangle with diagonal angle `θ`.
pub fn rectangle_from_flow(p1: &SurfacePoint, p3: &SurfacePoint, theta: f64) -> Result<(SurfacePoint, SurfacePoint)> {
    let state = PairState::new(*p1, *p3)?;
    if state.is_diagonal() {
        return Err(Error::CoincidentPoints);
    }
    let out = flow_closed_form(&state, theta)?;
    Ok((out.p, out.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn pair(s: Surface, rng: &mut ChaCha8Rng, r: f64) -> PairState {
        loop {
            let p = random_point(s, rng, r);
            let q = random_point(s, rng, r);
            if let Ok(st) = PairState::new(p, q) {
                if st.distance() > 0.05 {
                    return st;
                }
            }
        }
    }

    fn gap(a: &PairState, b: &PairState) -> f64 {
        let s = a.surface();
        s.dist(a.p.coords(), b.p.coords())
            .max(s.dist(a.q.coords(), b.q.coords()))
    }

    #[test]
    fn sphere_equator_rotates_to_meridian() {
        let s = Surface::Spherical;
        let p = SurfacePoint::new(s, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let q = SurfacePoint::new(s, Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let st = PairState::new(p, q).unwrap();
        let out = flow_closed_form(&st, PI).unwrap();
        assert!((out.p.coords() - q.coords()).norm() < 1e-14);
        assert!((out.q.coords() - p.coords()).norm() < 1e-14);
        let quarter = flow_closed_form(&st, PI / 2.0).unwrap();
        let m = Vec3::new(1.0, 1.0, 0.0).normalize();
        let c = (PI / 4.0).cos();
        assert!((quarter.p.coords().dot(&m) - c).abs() < 1e-14);
        assert!((quarter.p.coords().z.abs() - (PI / 4.0).sin()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_ode() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            for _ in 0..20 {
                let st = pair(s, &mut rng, 1.2);
                let theta = 2.0;
                let a = flow_closed_form(&st, theta).unwrap();
                let b = flow_ode(&st, theta, 1e-3).unwrap();
                assert!(gap(&a, &b) < 1e-10, "{s:?} {}", gap(&a, &b));
            }
        }
    }

    #[test]
    fn ode_converges_at_fourth_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let st = pair(Surface::Spherical, &mut rng, 1.0);
        let exact = flow_closed_form(&st, 1.5).unwrap();
        let e1 = gap(&exact, &flow_ode(&st, 1.5, 0.1).unwrap());
        let e2 = gap(&exact, &flow_ode(&st, 1.5, 0.05).unwrap());
        let ratio = e1 / e2;
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn swap_equivariance_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            for _ in 0..100 {
                let st = pair(s, &mut rng, 1.3);
                let a = flow_closed_form(&st, 0.7).unwrap();
                let b = flow_closed_form(&st.swapped(), 0.7).unwrap();
                assert_eq!(a.swapped(), b);
            }
        }
    }

    #[test]
    fn group_law_and_period() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            let st = pair(s, &mut rng, 1.0);
            let ab = flow_closed_form(&flow_closed_form(&st, 0.4).unwrap(), 1.1).unwrap();
            assert!(gap(&ab, &flow_closed_form(&st, 1.5).unwrap()) < 1e-12);
            assert!(gap(&flow_closed_form(&st, 2.0 * PI).unwrap(), &st) < 1e-12);
            assert!(gap(&flow_closed_form(&st, PI).unwrap(), &st.swapped()) < 1e-12);
        }
    }

    #[test]
    fn diagonal_is_fixed() {
        let p = SurfacePoint::new(Surface::Spherical, Vec3::new(0.0, 0.6, 0.8)).unwrap();
        let st = PairState::new(p, p).unwrap();
        assert_eq!(flow_closed_form(&st, 1.3).unwrap(), st);
        assert_eq!(flow_ode(&st, 1.3, 0.1).unwrap(), st);
        assert!(matches!(midpoint_axis(&st), Err(Error::CoincidentPoints)));
    }

    #[test]
    fn hamiltonian_is_conserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            let st = pair(s, &mut rng, 1.0);
            let h0 = hamiltonian(&st).unwrap();
            for theta in [0.3, 1.0, 2.5, 5.0] {
                let h = hamiltonian(&flow_ode(&st, theta, 0.01).unwrap()).unwrap();
                assert!((h - h0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn chordal_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..100 {
            let st = pair(Surface::Spherical, &mut rng, 3.0);
            let h = hamiltonian(&st).unwrap();
            assert!((h - hamiltonian_chordal(st.p.coords(), st.q.coords())).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(46);
        let eps = 1e-6;
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            for _ in 0..20 {
                let st = pair(s, &mut rng, 1.0);
                let (gp, gq) = hamiltonian_gradient(&st).unwrap();
                let (dp, dq) = distance_sq_gradient(&st).unwrap();
                let d = st.distance();
                let factor = match s {
                    Surface::Spherical => 2.0 * (d / 2.0).sin() / d,
                    _ => 2.0 * (d / 2.0).sinh() / d,
                };
                assert!((gp.vec() - dp.vec() * factor).norm() < 1e-12);
                assert!((gq.vec() - dq.vec() * factor).norm() < 1e-12);
                for (at_p, grad) in [(true, gp), (false, gq)] {
                    let base = if at_p { st.p } else { st.q };
                    for dir in [Vec3::x(), Vec3::y(), Vec3::z()] {
                        let e = s.project_tangent(base.coords(), &dir);
                        let moved = |h: f64| {
                            let b = SurfacePoint::from_raw(s, s.exp(base.coords(), &(e * h)));
                            let st2 = if at_p {
                                PairState::from_raw(s, *b.coords(), *st.q.coords())
                            } else {
                                PairState::from_raw(s, *st.p.coords(), *b.coords())
                            };
                            hamiltonian(&st2).unwrap()
                        };
                        let fd = (moved(eps) - moved(-eps)) / (2.0 * eps);
                        assert!((fd - s.inner(grad.vec(), &e)).abs() < 1e-7, "{s:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn symplectic_gradient_is_twice_the_generator() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            for _ in 0..20 {
                let st = pair(s, &mut rng, 1.0);
                let (gp, gq) = hamiltonian_gradient(&st).unwrap();
                let (fp, fq) = vector_field(&st).unwrap();
                assert!((gp.rotate90().vec() - fp.vec() * 2.0).norm() < 1e-12);
                assert!((gq.rotate90().vec() - fq.vec() * 2.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generator_matches_closed_form_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let eps = 1e-5;
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            let st = pair(s, &mut rng, 1.0);
            let (fp, _) = vector_field(&st).unwrap();
            let a = flow_closed_form(&st, eps).unwrap();
            let b = flow_closed_form(&st, -eps).unwrap();
            let fd = (a.p.coords() - b.p.coords()) / (2.0 * eps);
            assert!((fd - fp.vec()).norm() < 1e-8);
        }
    }

    #[test]
    fn plane_is_unsupported() {
        let s = Surface::Euclidean;
        let p = SurfacePoint::new(s, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let q = SurfacePoint::new(s, Vec3::new(0.0, 1.0, 0.0)).unwrap();
        let st = PairState::new(p, q).unwrap();
        assert!(matches!(hamiltonian(&st), Err(Error::UnsupportedSurface(_))));
        assert!(matches!(flow_ode(&st, 1.0, 0.1), Err(Error::UnsupportedSurface(_))));
    }

    #[test]
    fn antipodal_and_bad_step_rejected() {
        let s = Surface::Spherical;
        let p = SurfacePoint::new(s, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let q = SurfacePoint::new(s, Vec3::new(0.0, 0.0, -1.0)).unwrap();
        assert!(matches!(PairState::new(p, q), Err(Error::Antipodal)));
        let r = SurfacePoint::new(s, Vec3::new(1.0, 0.0, 0.0)).unwrap();
        let st = PairState::new(p, r).unwrap();
        assert!(flow_ode(&st, 1.0, 0.0).is_err());
        assert!(flow_ode(&st, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn rectangle_from_flow_has_equal_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(49);
        for s in [Surface::Spherical, Surface::Hyperbolic] {
            let st = pair(s, &mut rng, 1.0);
            let (p2, p4) = rectangle_from_flow(&st.p, &st.q, 1.2).unwrap();
            let d13 = st.distance();
            let d24 = s.dist(p2.coords(), p4.coords());
            assert!((d13 - d24).abs() < 1e-12);
            let d12 = s.dist(st.p.coords(), p2.coords());
            let d34 = s.dist(st.q.coords(), p4.coords());
            assert!((d12 - d34).abs() < 1e-12);
        }
        let p = SurfacePoint::origin(Surface::Hyperbolic);
        assert!(matches!(rectangle_from_flow(&p, &p, 1.0), Err(Error::CoincidentPoints)));
    }
}
