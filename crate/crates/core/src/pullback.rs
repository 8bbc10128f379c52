//! Symplectic pullback of diagonal forms under the quadrilateral map.
//!
//! In the bases `⟨w_p, C·jw_p, w_q, C·jw_q⟩` (with `C = cosh‖v‖`) the
//! differential of the quadrilateral map is the constant matrix
//! `N = M_{(φ2,θ)} · A_{φ1}⁻¹`. With `J_a = diag(aJ, J)` the congruence
//! `K = Nᵀ J_a N` is block diagonal `diag(bJ, cJ)`, so the map pulls
//! `a·ω₁ + ω₂` back to `b·ω₁ + c·ω₂`.

use nalgebra::{Matrix2, Matrix4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Surface, Vec3};
use crate::quad::{f_phi_inverse_raw, quad_map_raw, AngleTriple};
use crate::random::{random_point, random_tangent};

pub type Mat2 = Matrix2<f64>;
pub type Mat4 = Matrix4<f64>;

/// Maximum deviation of `K` from block form accepted by [`compute_constants`].
pub const BLOCK_TOLERANCE: f64 = 1e-9;

/// Pass threshold for the finite-difference check of the pullback identity.
pub const GEOMETRIC_TOLERANCE: f64 = 1e-4;

/// Central-difference step used by the geometric checks.
pub const FD_STEP: f64 = 1e-5;

/// `r_φ = [[cos φ, sin φ], [-sin φ, cos φ]]`.
pub fn rotation_mat(phi: f64) -> Mat2 {
    let (s, c) = phi.sin_cos();
    Mat2::new(c, s, -s, c)
}

/// `J = [[0, 1], [-1, 0]]`.
pub fn j_mat() -> Mat2 {
    Mat2::new(0.0, 1.0, -1.0, 0.0)
}

/// `r_φ - I`, with `cos φ - 1` evaluated as `-2 sin²(φ/2)`.
fn rotation_minus_identity(phi: f64) -> Mat2 {
    let h = (phi / 2.0).sin();
    let d = -2.0 * h * h;
    let s = phi.sin();
    Mat2::new(d, s, -s, d)
}

fn blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// `A_{φ1} = [[I, I], [I, r_{φ1}]]`.
pub fn a_matrix(phi1: f64) -> Mat4 {
    let i = Mat2::identity();
    blocks(&i, &i, &i, &rotation_mat(phi1))
}

/// `M_{(φ2,θ)} = [[I, r_θ], [I, r_{θ+φ2}]]`.
pub fn m_matrix(phi2: f64, theta: f64) -> Mat4 {
    let i = Mat2::identity();
    blocks(&i, &rotation_mat(theta), &i, &rotation_mat(theta + phi2))
}

/// `N = M_{(φ2,θ)} · A_{φ1}⁻¹`.
///
/// With `D = r_{φ1} - I`, `A⁻¹ = [[I + D⁻¹, -D⁻¹], [-D⁻¹, D⁻¹]]`, so each block
/// row of `N` is `[I - E·D⁻¹, E·D⁻¹]` with `E = r_α - I`. `D` is a scaled
/// rotation and `D⁻¹ = Dᵀ / (4 sin²(φ1/2))`.
pub fn build_n(t: &AngleTriple) -> Mat4 {
    let h = (t.phi1() / 2.0).sin();
    let d_inv = rotation_minus_identity(t.phi1()).transpose() / (4.0 * h * h);
    let i = Mat2::identity();
    let top = rotation_minus_identity(t.theta()) * d_inv;
    let bottom = rotation_minus_identity(t.theta() + t.phi2()) * d_inv;
    blocks(&(i - top), &top, &(i - bottom), &bottom)
}

/// `a = sin((φ2+θ)/2)·sin((φ2+θ-φ1)/2) / (sin(θ/2)·sin((φ1-θ)/2))`.
pub fn compute_a(t: &AngleTriple) -> f64 {
    let (theta, phi1, phi2) = (t.theta(), t.phi1(), t.phi2());
    ((phi2 + theta) / 2.0).sin() * ((phi2 + theta - phi1) / 2.0).sin()
        / ((theta / 2.0).sin() * ((phi1 - theta) / 2.0).sin())
}

/// `J_a = diag(aJ, J)`.
pub fn j_a(a: f64) -> Mat4 {
    let z = Mat2::zeros();
    blocks(&(j_mat() * a), &z, &z, &j_mat())
}

/// `K = Nᵀ J_a N`.
pub fn pullback_matrix(t: &AngleTriple) -> Mat4 {
    let n = build_n(t);
    n.transpose() * j_a(compute_a(t)) * n
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PullbackConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Max absolute deviation of `K` from `diag(bJ, cJ)`.
    pub residual: f64,
}

/// Reads `b = K[0][1]` and `c = K[2][3]` and measures how far `K` is from
/// `diag(bJ, cJ)`. A residual above [`BLOCK_TOLERANCE`] is reported as an error.
pub fn compute_constants(t: &AngleTriple) -> Result<PullbackConstants> {
    let constants = constants_unchecked(t);
    if !(constants.residual < BLOCK_TOLERANCE) {
        return Err(Error::BlockResidual {
            residual: constants.residual,
            tolerance: BLOCK_TOLERANCE,
        });
    }
    Ok(constants)
}

fn constants_unchecked(t: &AngleTriple) -> PullbackConstants {
    let a = compute_a(t);
    let k = pullback_matrix(t);
    let b = k[(0, 1)];
    let c = k[(2, 3)];
    let z = Mat2::zeros();
    let expected = blocks(&(j_mat() * b), &z, &z, &(j_mat() * c));
    let residual = (k - expected).amax();
    PullbackConstants { a, b, c, residual }
}

/// Area form `ω_z(X, Y) = det[z, X, Y]`; on the hyperboloid this is the
/// Minkowski cross-product form `⟨z ⊠ X, Y⟩ = ⟨jX, Y⟩`.
pub fn area_form(surface: Surface, z: &Vec3, x: &Vec3, y: &Vec3) -> f64 {
    match surface {
        Surface::Euclidean => x.x * y.y - x.y * y.x,
        Surface::Hyperbolic | Surface::Spherical => nalgebra::Matrix3::from_columns(&[*z, *x, *y]).determinant(),
    }
}

/// Tangent vectors at `p` and `q`.
#[derive(Clone, Copy, Debug)]
pub struct PairTangent {
    pub at_p: Vec3,
    pub at_q: Vec3,
}

/// Central finite difference of the quadrilateral map at `(p, q)` along `u`,
/// expressed as tangent vectors at the images `(p′, q′)`.
pub fn differential_fd(
    surface: Surface,
    p: &Vec3,
    q: &Vec3,
    u: &PairTangent,
    t: &AngleTriple,
    step: f64,
) -> Result<PairTangent> {
    let s = surface;
    let base = quad_map_raw(s, p, q, t)?;
    let shifted = |h: f64| -> Result<(Vec3, Vec3)> {
        let pp = s.exp(p, &(u.at_p * h));
        let qq = s.exp(q, &(u.at_q * h));
        let img = quad_map_raw(s, &pp, &qq, t)?;
        Ok((img.p2, img.q2))
    };
    let (pp, qp) = shifted(step)?;
    let (pm, qm) = shifted(-step)?;
    let at_p = (s.log(&base.p2, &pp)? - s.log(&base.p2, &pm)?) / (2.0 * step);
    let at_q = (s.log(&base.q2, &qp)? - s.log(&base.q2, &qm)?) / (2.0 * step);
    Ok(PairTangent {
        at_p: s.project_tangent(&base.p2, &at_p),
        at_q: s.project_tangent(&base.q2, &at_q),
    })
}

/// One random state of the geometric pullback check.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PullbackTrial {
    pub p: [f64; 3],
    pub q: [f64; 3],
    /// `ω_a(DI u₁, DI u₂)`.
    pub pulled_back: f64,
    /// `b·ω₁(u₁, u₂) + c·ω₂(u₁, u₂)`.
    pub predicted: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PullbackReport {
    pub triple: AngleTriple,
    pub constants: PullbackConstants,
    pub trials: usize,
    pub max_rel_error: f64,
    pub threshold: f64,
    pub failures: Vec<PullbackTrial>,
}

impl PullbackReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.constants.residual < BLOCK_TOLERANCE
    }
}

/// Compares `ω_a(DI u₁, DI u₂)` with `b·ω₁(u₁, u₂) + c·ω₂(u₁, u₂)` at one state.
///
/// The error is relative to `|b|·‖u₁ₚ‖‖u₂ₚ‖ + |c|·‖u₁_q‖‖u₂_q‖`, the natural
/// size of the right-hand side, so parallel pairs (both sides zero) are measured
/// on the same scale as generic ones.
pub fn pullback_trial(
    p: &Vec3,
    q: &Vec3,
    u1: &PairTangent,
    u2: &PairTangent,
    t: &AngleTriple,
    constants: &PullbackConstants,
) -> Result<PullbackTrial> {
    let s = Surface::Hyperbolic;
    let img = quad_map_raw(s, p, q, t)?;
    let d1 = differential_fd(s, p, q, u1, t, FD_STEP)?;
    let d2 = differential_fd(s, p, q, u2, t, FD_STEP)?;
    let pulled_back =
        constants.a * area_form(s, &img.p2, &d1.at_p, &d2.at_p) + area_form(s, &img.q2, &d1.at_q, &d2.at_q);
    let predicted =
        constants.b * area_form(s, p, &u1.at_p, &u2.at_p) + constants.c * area_form(s, q, &u1.at_q, &u2.at_q);
    let scale = constants.b.abs() * s.norm(&u1.at_p) * s.norm(&u2.at_p)
        + constants.c.abs() * s.norm(&u1.at_q) * s.norm(&u2.at_q);
    Ok(PullbackTrial {
        p: [p.x, p.y, p.z],
        q: [q.x, q.y, q.z],
        pulled_back,
        predicted,
        rel_error: (pulled_back - predicted).abs() / scale,
    })
}

/// Finite-difference check of the pullback identity on random hyperbolic
/// states, with a fixed seed.
pub fn verify_pullback_geometric(t: &AngleTriple, trials: usize) -> Result<PullbackReport> {
    verify_pullback_geometric_seeded(t, trials, 0x5eed)
}

pub fn verify_pullback_geometric_seeded(t: &AngleTriple, trials: usize, seed: u64) -> Result<PullbackReport> {
    let constants = constants_unchecked(t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = Surface::Hyperbolic;
    let mut max_rel_error: f64 = 0.0;
    let mut failures = Vec::new();
    let mut done = 0;
    while done < trials {
        let p = random_point(s, &mut rng, 1.5);
        let q = random_point(s, &mut rng, 1.5);
        if s.dist(p.coords(), q.coords()) < 0.1 {
            continue;
        }
        let u1 = PairTangent {
            at_p: *random_tangent(&p, &mut rng, 1.0).vec(),
            at_q: *random_tangent(&q, &mut rng, 1.0).vec(),
        };
        let u2 = PairTangent {
            at_p: *random_tangent(&p, &mut rng, 1.0).vec(),
            at_q: *random_tangent(&q, &mut rng, 1.0).vec(),
        };
        let trial = pullback_trial(p.coords(), q.coords(), &u1, &u2, t, &constants)?;
        max_rel_error = max_rel_error.max(trial.rel_error);
        if !(trial.rel_error < GEOMETRIC_TOLERANCE) {
            failures.push(trial);
        }
        done += 1;
    }
    Ok(PullbackReport {
        triple: *t,
        constants,
        trials,
        max_rel_error,
        threshold: GEOMETRIC_TOLERANCE,
        failures,
    })
}

/// Finite-difference differential at `(p, q)` written in the bases
/// `⟨w_p, C·jw_p, w_q, C·jw_q⟩ → ⟨w_p′, C·jw_p′, w_q′, C·jw_q′⟩`.
pub fn differential_in_frames(surface: Surface, p: &Vec3, q: &Vec3, t: &AngleTriple, step: f64) -> Result<Mat4> {
    let s = surface;
    let (x, v) = f_phi_inverse_raw(s, p, q, t.phi1())?;
    let c = s.jacobi_even(s.norm(&v));
    let frame = |angle: f64| {
        let w = s.rotate(&x, &v, angle);
        let base = s.exp(&x, &w);
        let vel = s.project_tangent(&base, &s.geodesic_velocity(&x, &w));
        (base, vel, s.rotate90(&base, &vel))
    };
    let (_, wp, jwp) = frame(0.0);
    let (_, wq, jwq) = frame(t.phi1());
    let (bp2, wp2, jwp2) = frame(t.theta());
    let (bq2, wq2, jwq2) = frame(t.theta() + t.phi2());
    let _ = (bp2, bq2);
    let zero = Vec3::zeros();
    let inputs = [
        PairTangent { at_p: wp, at_q: zero },
        PairTangent {
            at_p: jwp * c,
            at_q: zero,
        },
        PairTangent { at_p: zero, at_q: wq },
        PairTangent {
            at_p: zero,
            at_q: jwq * c,
        },
    ];
    let mut m = Mat4::zeros();
    for (k, u) in inputs.iter().enumerate() {
        let d = differential_fd(s, p, q, u, t, step)?;
        m[(0, k)] = s.inner(&d.at_p, &wp2);
        m[(1, k)] = s.inner(&d.at_p, &jwp2) / c;
        m[(2, k)] = s.inner(&d.at_q, &wq2);
        m[(3, k)] = s.inner(&d.at_q, &jwq2) / c;
    }
    Ok(m)
}
