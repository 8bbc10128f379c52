//! Brute-force oracle for inscriptions.
//!
//! Works in its own coordinates (Poincaré disk, complex plane, unit vectors in
//! ℝ³), with its own interpolation and distance-to-curve evaluation, so that it
//! shares no numerical code with the grid scan and refinement.

use num_complex::Complex64;
use serde::Serialize;

use super::{torus_distance, Inscription, PairMap};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::geometry::{Surface, Vec3};

pub const ORACLE_MIN_GRID: usize = 256;
/// Refined minima with `sqrt(E)` above this are discarded.
pub const ORACLE_ACCEPT: f64 = 1e-6;

/// A local minimum of `E(s, t) = d(p′, γ)² + d(q′, γ)²`; `value` is `sqrt(E)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleMinimum {
    pub s: f64,
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Model {
    Disk,
    Plane,
    Sphere,
}

struct OracleCurve {
    model: Model,
    pts: Vec<Vec3>,
    /// `1 - |w|²` for disk samples.
    conformal: Vec<f64>,
}

fn c(v: &Vec3) -> Complex64 {
    Complex64::new(v.x, v.y)
}

fn v(z: Complex64) -> Vec3 {
    Vec3::new(z.re, z.im, 0.0)
}

impl OracleCurve {
    fn new(sc: &SampledCurve) -> Self {
        let model = match sc.surface() {
            Surface::Hyperbolic => Model::Disk,
            Surface::Euclidean => Model::Plane,
            Surface::Spherical => Model::Sphere,
        };
        let pts: Vec<Vec3> = sc
            .points()
            .iter()
            .map(|p| {
                let q = p.coords();
                match model {
                    Model::Disk => Vec3::new(q.y / (1.0 + q.x), q.z / (1.0 + q.x), 0.0),
                    _ => *q,
                }
            })
            .collect();
        let conformal = pts.iter().map(|p| 1.0 - p.norm_squared()).collect();
        Self { model, pts, conformal }
    }

    fn dist(&self, a: &Vec3, b: &Vec3) -> f64 {
        match self.model {
            Model::Disk => {
                let delta = (a - b).norm_squared() / ((1.0 - a.norm_squared()) * (1.0 - b.norm_squared()));
                (1.0 + 2.0 * delta).acosh()
            }
            Model::Plane => (a - b).norm(),
            Model::Sphere => a.cross(b).norm().atan2(a.dot(b)),
        }
    }

    /// Cubic Lagrange interpolation through the four nearest samples.
    fn at(&self, u: f64) -> Vec3 {
        let n = self.pts.len();
        let x = u.rem_euclid(1.0) * n as f64;
        let i = x.floor() as usize % n;
        let t = x - x.floor();
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let p = (0..4).fold(Vec3::zeros(), |acc, k| acc + self.pts[(i + n + k - 1) % n] * w[k]);
        match self.model {
            Model::Sphere => p.normalize(),
            _ => p,
        }
    }

    /// Index of the closest sample, by exhaustive scan.
    fn closest_sample(&self, p: &Vec3) -> usize {
        let mut best = (f64::INFINITY, 0);
        match self.model {
            Model::Disk => {
                let cp = 1.0 - p.norm_squared();
                for (i, q) in self.pts.iter().enumerate() {
                    let key = (p - q).norm_squared() / (cp * self.conformal[i]);
                    if key < best.0 {
                        best = (key, i);
                    }
                }
            }
            Model::Plane => {
                for (i, q) in self.pts.iter().enumerate() {
                    let key = (p - q).norm_squared();
                    if key < best.0 {
                        best = (key, i);
                    }
                }
            }
            Model::Sphere => {
                for (i, q) in self.pts.iter().enumerate() {
                    let key = -p.dot(q);
                    if key < best.0 {
                        best = (key, i);
                    }
                }
            }
        }
        best.1
    }

    fn sample_distance(&self, p: &Vec3) -> f64 {
        self.dist(p, &self.pts[self.closest_sample(p)])
    }

    /// Distance to the interpolated curve: closest sample, then golden-section
    /// search over the two adjacent intervals.
    fn curve_distance(&self, p: &Vec3) -> f64 {
        let n = self.pts.len() as f64;
        let i = self.closest_sample(p) as f64;
        let f = |u: f64| self.dist(p, &self.at(u));
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = ((i - 1.0) / n, (i + 1.0) / n);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..80 {
            if f1 < f2 {
                b = x2;
                (x2, f2) = (x1, f1);
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                (x1, f1) = (x2, f2);
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        f1.min(f2).min(self.sample_distance(p))
    }

    /// Images `(p′, q′)` of the pair `(p, q)`.
    fn image(&self, map: &PairMap, p: &Vec3, q: &Vec3) -> Option<(Vec3, Vec3)> {
        let (theta, phi1, phi2) = match (self.model, map) {
            (Model::Sphere, PairMap::RectangleFlow(theta)) => return sphere_rotation(p, q, *theta),
            (Model::Sphere, PairMap::Cyclic(_)) => return None,
            (_, PairMap::RectangleFlow(theta)) => (*theta, std::f64::consts::PI, std::f64::consts::PI),
            (_, PairMap::Cyclic(t)) => (t.theta(), t.phi1(), t.phi2()),
        };
        let (zp, zq) = (c(p), c(q));
        let e1 = Complex64::from_polar(1.0, phi1);
        let center = (zq - e1 * zp) / (Complex64::new(1.0, 0.0) - e1);
        let r1 = Complex64::from_polar(1.0, theta);
        let r2 = Complex64::from_polar(1.0, theta + phi2);
        match self.model {
            Model::Plane => Some((v(center + r1 * (zp - center)), v(center + r2 * (zp - center)))),
            Model::Disk => {
                let x = mobius_center(zp, zq, e1, center)?;
                let a = mobius(x, zp);
                Some((v(mobius_inv(x, r1 * a)), v(mobius_inv(x, r2 * a))))
            }
            Model::Sphere => unreachable!(),
        }
    }
}

/// `T_x(z) = (z - x) / (1 - x̄z)`, moving `x` to the origin.
fn mobius(x: Complex64, z: Complex64) -> Complex64 {
    (z - x) / (Complex64::new(1.0, 0.0) - x.conj() * z)
}

fn mobius_inv(x: Complex64, z: Complex64) -> Complex64 {
    (z + x) / (Complex64::new(1.0, 0.0) + x.conj() * z)
}

/// Disk point `x` with `T_x(q) = e^{iφ} T_x(p)`, by damped Newton from the
/// Euclidean center.
fn mobius_center(p: Complex64, q: Complex64, rot: Complex64, start: Complex64) -> Option<Complex64> {
    let g = |x: Complex64| mobius(x, q) - rot * mobius(x, p);
    let mut x = if start.norm() < 0.99 {
        start
    } else {
        start * (0.9 / start.norm())
    };
    let mut gx = g(x);
    let h = 1e-7;
    for _ in 0..60 {
        if gx.norm() < 1e-15 {
            return Some(x);
        }
        let dre = (g(x + h) - g(x - h)) / (2.0 * h);
        let dim = (g(x + Complex64::new(0.0, h)) - g(x - Complex64::new(0.0, h))) / (2.0 * h);
        let det = dre.re * dim.im - dim.re * dre.im;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = Complex64::new(
            -(dim.im * gx.re - dim.re * gx.im) / det,
            -(-dre.im * gx.re + dre.re * gx.im) / det,
        );
        let mut lambda = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let next = x + step * lambda;
            if next.norm() < 1.0 {
                let gn = g(next);
                if gn.norm() < gx.norm() {
                    (x, gx) = (next, gn);
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            break;
        }
    }
    (gx.norm() < 1e-12).then_some(x)
}

/// Rotates `p` and `q` by `θ` about the axis through their midpoint.
fn sphere_rotation(p: &Vec3, q: &Vec3, theta: f64) -> Option<(Vec3, Vec3)> {
    let sum = p + q;
    if sum.norm() < 1e-12 {
        return None;
    }
    let m = sum.normalize();
    let (s, c) = theta.sin_cos();
    let rot = |a: &Vec3| a * c + m.cross(a) * s + m * (m.dot(a) * (1.0 - c));
    Some((rot(p), rot(q)))
}

/// Exhaustive `n × n` evaluation of `E(s, t)`, local minima below three grid
/// spacings of curve length, each polished by compass search.
pub fn brute_force_oracle(sc: &SampledCurve, map: &PairMap, n: usize) -> Result<Vec<OracleMinimum>> {
    if n < ORACLE_MIN_GRID {
        return Err(Error::GridTooSmall {
            n,
            min: ORACLE_MIN_GRID,
        });
    }
    let curve = OracleCurve::new(sc);
    if curve.model == Model::Sphere && matches!(map, PairMap::Cyclic(_)) {
        return Err(Error::UnsupportedSurface(Surface::Spherical));
    }
    let h = 1.0 / n as f64;
    let nodes: Vec<Vec3> = (0..n).map(|i| curve.at(i as f64 * h)).collect();
    let length: f64 = (0..n).map(|i| curve.dist(&nodes[i], &nodes[(i + 1) % n])).sum();
    let threshold = 3.0 * length / n as f64;
    let band = 2usize;
    let mut energy = vec![f64::NAN; n * n];
    for i in 0..n {
        for j in 0..n {
            let gap = (i + n - j) % n;
            if gap.min(n - gap) <= band {
                continue;
            }
            if let Some((a, b)) = curve.image(map, &nodes[i], &nodes[j]) {
                let (da, db) = (curve.sample_distance(&a), curve.sample_distance(&b));
                energy[i * n + j] = da * da + db * db;
            }
        }
    }
    let mut minima = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let e = energy[i * n + j];
            if !(e.sqrt() < threshold) {
                continue;
            }
            let local = (0..9).filter(|&k| k != 4).all(|k| {
                let o = energy[((i + n + k / 3 - 1) % n) * n + (j + n + k % 3 - 1) % n];
                o >= e
            });
            if local {
                minima.push((i as f64 * h, j as f64 * h));
            }
        }
    }
    let continuous = |s: f64, t: f64| -> f64 {
        if torus_distance(s, t) < 2.0 * h {
            return f64::INFINITY;
        }
        match curve.image(map, &curve.at(s), &curve.at(t)) {
            Some((a, b)) => {
                let (da, db) = (curve.curve_distance(&a), curve.curve_distance(&b));
                da * da + db * db
            }
            None => f64::INFINITY,
        }
    };
    let mut out: Vec<OracleMinimum> = Vec::new();
    for (s0, t0) in minima {
        let (s, t, e) = compass_search(&continuous, s0, t0, h);
        let value = e.sqrt();
        if !(value < ORACLE_ACCEPT) {
            continue;
        }
        let m = OracleMinimum {
            s: s.rem_euclid(1.0),
            t: t.rem_euclid(1.0),
            value,
        };
        match out
            .iter_mut()
            .find(|o| torus_distance(o.s, m.s) < h && torus_distance(o.t, m.t) < h)
        {
            Some(o) if o.value > m.value => *o = m,
            Some(_) => {}
            None => out.push(m),
        }
    }
    out.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.t.total_cmp(&b.t)));
    Ok(out)
}

/// Pattern search over the eight compass directions with step halving.
fn compass_search(f: &impl Fn(f64, f64) -> f64, mut s: f64, mut t: f64, start: f64) -> (f64, f64, f64) {
    let dirs = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (1.0, 1.0),
        (1.0, -1.0),
        (-1.0, 1.0),
        (-1.0, -1.0),
    ];
    let mut best = f(s, t);
    let mut step = start;
    let mut evals = 0;
    while step > 1e-12 && evals < 20_000 {
        let mut moved = false;
        for (ds, dt) in dirs {
            let (ns, nt) = (s + ds * step, t + dt * step);
            let e = f(ns, nt);
            evals += 1;
            if e < best {
                (s, t, best) = (ns, nt, e);
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (s, t, best)
}

/// Every solver result lies within `tol` of an oracle minimum on the torus, and vice versa.
pub fn solver_agrees_with_oracle(found: &[Inscription], minima: &[OracleMinimum], tol: f64) -> bool {
    let close = |ins: &Inscription, m: &OracleMinimum| {
        torus_distance(m.s, ins.params[0]) < tol && torus_distance(m.t, ins.params[2]) < tol
    };
    found.iter().all(|ins| minima.iter().any(|m| close(ins, m)))
        && minima.iter().all(|m| found.iter().any(|ins| close(ins, m)))
}
