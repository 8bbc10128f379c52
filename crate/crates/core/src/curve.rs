//! Closed curves given by dense samples, interpolated by a periodic cubic
//! spline in embedding coordinates and projected back onto the surface.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Surface, SurfacePoint, Vec3};

pub const MIN_SAMPLES: usize = 64;
pub const MAX_SPACING: f64 = 0.1;
const BLOCK: usize = 32;

#[derive(Clone, Debug)]
struct Block {
    start: usize,
    len: usize,
    center: Vec3,
    radius: f64,
}

#[derive(Clone, Debug)]
pub struct SampledCurve {
    surface: Surface,
    points: Vec<SurfacePoint>,
    params: Vec<f64>,
    diameter: f64,
    /// Second derivatives of the spline at the knots, per coordinate.
    second: Vec<Vec3>,
    blocks: Vec<Block>,
}

/// Foot of the perpendicular from a point to the curve.
#[derive(Clone, Copy, Debug)]
pub struct Foot {
    pub param: f64,
    pub point: Vec3,
    /// Signed distance, positive on the left of the curve's direction.
    pub signed_distance: f64,
}

impl SampledCurve {
    /// Builds a curve through `points`, taken at equally spaced parameters in `[0, 1)`.
    pub fn new(surface: Surface, points: Vec<SurfacePoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.surface() != surface) {
            return Err(Error::SurfaceMismatch(surface, p.surface()));
        }
        let n = points.len();
        if n < MIN_SAMPLES {
            return Err(Error::InvalidCurve(format!("{n} samples, need at least {MIN_SAMPLES}")));
        }
        let raw: Vec<Vec3> = points.iter().map(|p| *p.coords()).collect();
        for i in 0..n {
            let d = surface.dist(&raw[i], &raw[(i + 1) % n]);
            if !(d > 1e-12) {
                return Err(Error::InvalidCurve(format!("repeated point at sample {i}")));
            }
            if d >= MAX_SPACING {
                return Err(Error::InvalidCurve(format!(
                    "spacing {d} between samples {i} and {} is not below {MAX_SPACING}",
                    (i + 1) % n
                )));
            }
        }
        check_simple(surface, &raw)?;
        let diameter = diameter_of(surface, &raw);
        let second = spline_second_derivatives(&raw);
        let blocks = build_blocks(surface, &raw);
        Ok(Self {
            surface,
            params: (0..n).map(|i| i as f64 / n as f64).collect(),
            points,
            diameter,
            second,
            blocks,
        })
    }

    /// Samples `f` at `n` equally spaced parameters, projecting each value onto the surface.
    pub fn from_fn(surface: Surface, n: usize, f: impl Fn(f64) -> Vec3) -> Result<Self> {
        let points = (0..n)
            .map(|i| SurfacePoint::project(surface, f(i as f64 / n as f64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(surface, points)
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[SurfacePoint] {
        &self.points
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Largest distance between two samples.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// `π - diameter` on the sphere: positive exactly when the curve misses its antipodal image.
    pub fn antipodal_clearance(&self) -> Option<f64> {
        (self.surface == Surface::Spherical).then_some(PI - self.diameter)
    }

    /// Length of the sample polygon.
    pub fn polygon_length(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.surface
                    .dist(self.points[i].coords(), self.points[(i + 1) % n].coords())
            })
            .sum()
    }

    /// The same samples with the parameter origin moved forward by `k` samples.
    pub fn rotated(&self, k: usize) -> Self {
        let n = self.len();
        let mut out = self.clone();
        out.points.rotate_left(k % n);
        out.second.rotate_left(k % n);
        out.blocks = build_blocks(
            self.surface,
            &out.points.iter().map(|p| *p.coords()).collect::<Vec<_>>(),
        );
        out
    }

    fn segment(&self, u: f64) -> (usize, usize, f64) {
        let n = self.len();
        let x = u.rem_euclid(1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        (i, (i + 1) % n, x - i as f64)
    }

    /// Spline value and parameter derivative in embedding coordinates, before projection.
    fn spline(&self, u: f64) -> (Vec3, Vec3) {
        let n = self.len() as f64;
        let h = 1.0 / n;
        let (i, k, tau) = self.segment(u);
        let (y0, y1) = (self.points[i].coords(), self.points[k].coords());
        let (m0, m1) = (&self.second[i], &self.second[k]);
        let a = 1.0 - tau;
        let val = y0 * a + y1 * tau + (m0 * (a * a * a - a) + m1 * (tau * tau * tau - tau)) * (h * h / 6.0);
        let der = (y1 - y0) * n + (m0 * (1.0 - 3.0 * a * a) + m1 * (3.0 * tau * tau - 1.0)) * (h / 6.0);
        (val, der)
    }

    /// Point and tangent of the projected curve at parameter `u`.
    pub(crate) fn eval_with_tangent(&self, u: f64) -> (Vec3, Vec3) {
        let (c, dc) = self.spline(u);
        match self.surface {
            Surface::Hyperbolic => {
                let p = self.surface.project_point(&c);
                let t0 = (p.y * dc.y + p.z * dc.z) / p.x;
                (p, Vec3::new(t0, dc.y, dc.z))
            }
            Surface::Spherical => {
                let r = c.norm();
                let p = c / r;
                (p, (dc - p * p.dot(&dc)) / r)
            }
            Surface::Euclidean => (Vec3::new(c.x, c.y, 0.0), Vec3::new(dc.x, dc.y, 0.0)),
        }
    }

    pub(crate) fn eval(&self, u: f64) -> Vec3 {
        self.surface.project_point(&self.spline(u).0)
    }

    /// The interpolated curve at parameter `u` (taken mod 1).
    pub fn point_at(&self, u: f64) -> SurfacePoint {
        SurfacePoint::from_raw(self.surface, self.eval(u))
    }

    /// Index of the sample closest to `p`.
    pub(crate) fn nearest_sample(&self, p: &Vec3) -> usize {
        let s = self.surface;
        let mut order: Vec<(f64, usize)> = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, blk)| (s.dist(p, &blk.center) - blk.radius, b))
            .collect();
        order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = (f64::INFINITY, 0usize);
        let mut best_dist = f64::INFINITY;
        for &(bound, b) in &order {
            if bound > best_dist {
                break;
            }
            let blk = &self.blocks[b];
            for i in blk.start..blk.start + blk.len {
                let key = s.closeness(p, self.points[i].coords());
                if key < best.0 {
                    best = (key, i);
                }
            }
            best_dist = s.dist(p, self.points[best.1].coords());
        }
        best.1
    }

    /// Derivative along the curve of the closeness key to `p`.
    fn key_slope(&self, u: f64, p: &Vec3) -> f64 {
        let (g, dg) = self.eval_with_tangent(u);
        match self.surface {
            Surface::Hyperbolic => -self.surface.inner(&dg, p),
            Surface::Spherical => -dg.dot(p),
            Surface::Euclidean => 2.0 * (g - p).dot(&dg),
        }
    }

    /// Nearest point of the interpolated curve to `p`, seeded at the nearest sample.
    pub fn foot(&self, p: &Vec3) -> Foot {
        let n = self.len();
        let h = 1.0 / n as f64;
        let i = self.nearest_sample(p);
        let mut a = (i as f64 - 1.0) * h;
        let mut b = (i as f64 + 1.0) * h;
        let mut ga = self.key_slope(a, p);
        let mut gb = self.key_slope(b, p);
        for _ in 0..4 {
            if ga < 0.0 && gb > 0.0 {
                break;
            }
            if ga >= 0.0 {
                (b, gb) = (a, ga);
                a -= h;
                ga = self.key_slope(a, p);
            } else {
                (a, ga) = (b, gb);
                b += h;
                gb = self.key_slope(b, p);
            }
        }
        let u = if ga < 0.0 && gb > 0.0 {
            illinois(|u| self.key_slope(u, p), a, b, ga, gb)
        } else {
            i as f64 * h
        };
        let u = u.rem_euclid(1.0);
        let (f, t) = self.eval_with_tangent(u);
        let s = self.surface;
        let normal = s.rotate90(&f, &t);
        let nn = s.norm(&normal);
        let signed_distance = match s.log(&f, p) {
            Ok(w) if nn > 0.0 => s.inner(&normal, &w) / nn,
            _ => s.dist(&f, p),
        };
        Foot {
            param: u,
            point: f,
            signed_distance,
        }
    }
}

/// Regula falsi with the Illinois modification on a bracket with `ga < 0 < gb`.
fn illinois(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64, mut gb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..100 {
        let c = (a * gb - b * ga) / (gb - ga);
        if !(c > a && c < b) || b - a < 1e-16 {
            return 0.5 * (a + b);
        }
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc < 0.0 {
            (a, ga) = (c, gc);
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            (b, gb) = (c, gc);
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
    }
    if ga.abs() < gb.abs() {
        a
    } else {
        b
    }
}

/// Periodic cubic spline second derivatives for equally spaced knots on `[0, 1)`.
fn spline_second_derivatives(y: &[Vec3]) -> Vec<Vec3> {
    let n = y.len();
    let scale = 6.0 * (n * n) as f64;
    let rhs: Vec<Vec3> = (0..n)
        .map(|i| (y[(i + 1) % n] - y[i] * 2.0 + y[(i + n - 1) % n]) * scale)
        .collect();
    // The system M[i-1] + 4 M[i] + M[i+1] = rhs[i] is strictly diagonally
    // dominant; Gauss-Seidel contracts by at least 1/2 per sweep.
    let mut m: Vec<Vec3> = rhs.iter().map(|r| r / 6.0).collect();
    let size = rhs.iter().map(|r| r.amax()).fold(0.0, f64::max).max(1e-300);
    for _ in 0..200 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let next = (rhs[i] - m[(i + n - 1) % n] - m[(i + 1) % n]) / 4.0;
            change = change.max((next - m[i]).amax());
            m[i] = next;
        }
        if change <= 1e-16 * size {
            break;
        }
    }
    m
}

fn build_blocks(s: Surface, raw: &[Vec3]) -> Vec<Block> {
    raw.chunks(BLOCK)
        .enumerate()
        .map(|(b, chunk)| {
            let center = chunk[chunk.len() / 2];
            let radius = chunk.iter().map(|p| s.dist(&center, p)).fold(0.0, f64::max);
            Block {
                start: b * BLOCK,
                len: chunk.len(),
                center,
                radius: radius * (1.0 + 1e-12) + 1e-15,
            }
        })
        .collect()
}

fn diameter_of(s: Surface, raw: &[Vec3]) -> f64 {
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for i in 0..raw.len() {
        for j in i + 1..raw.len() {
            let key = s.closeness(&raw[i], &raw[j]);
            if key > best.0 {
                best = (key, i, j);
            }
        }
    }
    s.dist(&raw[best.1], &raw[best.2])
}

/// Flat chart in which sample segments are checked for crossings.
fn flat_chart(s: Surface, raw: &[Vec3]) -> Vec<[f64; 2]> {
    match s {
        // Klein model: geodesics are chords.
        Surface::Hyperbolic => raw.iter().map(|p| [p.y / p.x, p.z / p.x]).collect(),
        Surface::Euclidean => raw.iter().map(|p| [p.x, p.y]).collect(),
        Surface::Spherical => {
            // Stereographic projection from the candidate pole farthest from every sample.
            let mean = raw.iter().sum::<Vec3>();
            let mut poles = vec![Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x(), -Vec3::y(), -Vec3::z()];
            if mean.norm() > 1e-9 {
                poles.push(-mean.normalize());
            }
            let clearance = |pole: &Vec3| raw.iter().map(|p| p.dot(pole)).fold(f64::NEG_INFINITY, f64::max);
            let pole = poles
                .into_iter()
                .min_by(|a, b| clearance(a).total_cmp(&clearance(b)))
                .expect("nonempty");
            let c = -pole;
            let helper = if c.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
            let e1 = c.cross(&helper).normalize();
            let e2 = c.cross(&e1);
            raw.iter()
                .map(|p| {
                    let k = 1.0 + p.dot(&c);
                    [p.dot(&e1) / k, p.dot(&e2) / k]
                })
                .collect()
        }
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_meet(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let lo = |x: [f64; 2], y: [f64; 2], k: usize| x[k].min(y[k]);
    let hi = |x: [f64; 2], y: [f64; 2], k: usize| x[k].max(y[k]);
    for k in 0..2 {
        if hi(a, b, k) < lo(c, d, k) || hi(c, d, k) < lo(a, b, k) {
            return false;
        }
    }
    orient(a, b, c) * orient(a, b, d) <= 0.0 && orient(c, d, a) * orient(c, d, b) <= 0.0
}

fn check_simple(s: Surface, raw: &[Vec3]) -> Result<()> {
    let flat = flat_chart(s, raw);
    if flat.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidCurve("curve covers the projection point".into()));
    }
    let n = flat.len();
    for i in 0..n {
        let (a, b) = (flat[i], flat[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_meet(a, b, flat[j], flat[(j + 1) % n]) {
                return Err(Error::InvalidCurve(format!("segments {i} and {j} intersect")));
            }
        }
    }
    Ok(())
}
