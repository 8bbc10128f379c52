//! Search for inscribed cyclic quadrilaterals and rectangles.
//!
//! A pair of curve parameters `(s, t)` is mapped to `(p′, q′)` by the
//! quadrilateral map (or by the rectangle flow); an inscription is a zero of the
//! signed distances of `p′` and `q′` to the curve, away from the diagonal.

pub mod oracle;

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::flow::midpoint_axis_raw;
use crate::geometry::{wrap_signed, Surface, SurfacePoint, Vec3};
use crate::quad::{quad_map_raw, AngleTriple, CirclePair, QuadRaw};

/// Half-width of the excluded band around `s = t`, in parameter units.
pub const DIAGONAL_BAND: f64 = 1e-4;
pub const MIN_GRID: usize = 64;
/// Grid nodes with `‖residual‖` below this are kept as local-minimum seeds.
pub const COARSE_THRESHOLD: f64 = 0.05;
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
pub const DEDUP_TOLERANCE: f64 = 1e-4;
pub const VALIDATION_TOLERANCE: f64 = 1e-8;
pub const DISTINCT_TOLERANCE: f64 = 1e-6;
pub const MAX_ITERATIONS: usize = 50;
pub const DEFAULT_GRID: usize = 256;

const TARGET_RESIDUAL: f64 = 1e-13;
const JACOBIAN_STEP: f64 = 1e-6;

/// How a pair of points on the curve produces the other two vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairMap {
    /// The quadrilateral map of the triple.
    Cyclic(AngleTriple),
    /// Rotation of the diameter `(p, q)` by `θ` about its midpoint.
    RectangleFlow(f64),
}

impl PairMap {
    pub fn rectangle_flow(theta: f64) -> Result<Self> {
        AngleTriple::rectangle(theta)?;
        Ok(PairMap::RectangleFlow(theta))
    }

    /// The angle pattern of the vertices produced by this map.
    pub fn triple(&self) -> AngleTriple {
        match *self {
            PairMap::Cyclic(t) => t,
            PairMap::RectangleFlow(theta) => AngleTriple::rectangle(theta).expect("validated at construction"),
        }
    }

    pub(crate) fn apply(&self, s: Surface, p: &Vec3, q: &Vec3) -> Result<QuadRaw> {
        match self {
            PairMap::Cyclic(t) => quad_map_raw(s, p, q, t),
            PairMap::RectangleFlow(theta) => {
                let (x, v) = midpoint_axis_raw(s, p, q).ok_or(if p == q {
                    Error::CoincidentPoints
                } else {
                    Error::Antipodal
                })?;
                let w = s.rotate(&x, &v, *theta);
                Ok(QuadRaw {
                    x,
                    v,
                    p2: s.exp(&x, &w),
                    q2: s.exp(&x, &-w),
                })
            }
        }
    }
}

/// Distance between two parameters on the circle `ℝ/ℤ`.
pub fn torus_distance(a: f64, b: f64) -> f64 {
    ((a - b + 0.5).rem_euclid(1.0) - 0.5).abs()
}

#[derive(Clone, Copy, Debug)]
pub struct Inscription {
    /// Curve parameters of the vertices at angles `(0, θ, φ1, φ2 + θ)`.
    pub params: [f64; 4],
    pub circle: CirclePair,
    pub triple: AngleTriple,
    /// Euclidean norm of the signed-distance residual at `(params[0], params[2])`.
    pub residual: f64,
    pub iterations: usize,
}

impl Inscription {
    /// The four curve points.
    pub fn vertices(&self, sc: &SampledCurve) -> [SurfacePoint; 4] {
        self.params.map(|u| sc.point_at(u))
    }
}

/// Signed distances from the curve of `(p′, q′) = quad_map(γ(s), γ(t))`.
pub fn residual(sc: &SampledCurve, s: f64, t: f64, triple: &AngleTriple) -> Result<(f64, f64)> {
    let r = residual_with(sc, s, t, &PairMap::Cyclic(*triple))?;
    Ok((r[0], r[1]))
}

pub fn residual_with(sc: &SampledCurve, s: f64, t: f64, map: &PairMap) -> Result<[f64; 2]> {
    let gap = torus_distance(s, t);
    if gap < DIAGONAL_BAND {
        return Err(Error::NearDiagonal {
            distance: gap,
            guard: DIAGONAL_BAND,
        });
    }
    let surface = sc.surface();
    let raw = map.apply(surface, &sc.eval(s), &sc.eval(t))?;
    Ok([sc.foot(&raw.p2).signed_distance, sc.foot(&raw.q2).signed_distance])
}

/// Seeds for [`refine`] from an `n × n` grid on the parameter torus.
pub fn grid_scan(sc: &SampledCurve, triple: &AngleTriple, n: usize) -> Result<Vec<(f64, f64)>> {
    grid_scan_with(sc, &PairMap::Cyclic(*triple), n)
}

/// Cell centers where both residual components change sign among the four
/// corners, followed by nodes that are local minima of `‖residual‖` below
/// [`COARSE_THRESHOLD`].
pub fn grid_scan_with(sc: &SampledCurve, map: &PairMap, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < MIN_GRID {
        return Err(Error::GridTooSmall { n, min: MIN_GRID });
    }
    let h = 1.0 / n as f64;
    let band = DIAGONAL_BAND.max(2.0 * h);
    let surface = sc.surface();
    let nodes: Vec<Vec3> = (0..n).map(|i| sc.eval(i as f64 * h)).collect();
    let mut values: Vec<Option<[f64; 2]>> = vec![None; n * n];
    for i in 0..n {
        for j in 0..n {
            if torus_distance(i as f64 * h, j as f64 * h) < band {
                continue;
            }
            if let Ok(raw) = map.apply(surface, &nodes[i], &nodes[j]) {
                values[i * n + j] = Some([sc.foot(&raw.p2).signed_distance, sc.foot(&raw.q2).signed_distance]);
            }
        }
    }
    let at = |i: usize, j: usize| values[(i % n) * n + (j % n)];
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            if corners.iter().any(|c| c.is_none()) {
                continue;
            }
            let changes = |k: usize| {
                let (lo, hi) = corners
                    .iter()
                    .flatten()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
                        (lo.min(c[k]), hi.max(c[k]))
                    });
                lo <= 0.0 && hi >= 0.0
            };
            if changes(0) && changes(1) {
                seeds.push(((i as f64 + 0.5) * h, (j as f64 + 0.5) * h));
            }
        }
    }
    let norm = |c: [f64; 2]| c[0].hypot(c[1]);
    for i in 0..n {
        for j in 0..n {
            let Some(c) = at(i, j) else { continue };
            let value = norm(c);
            if value >= COARSE_THRESHOLD {
                continue;
            }
            let mut is_min = true;
            'nbr: for di in [n - 1, 0, 1] {
                for dj in [n - 1, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    match at(i + di, j + dj) {
                        Some(o) if norm(o) >= value => {}
                        _ => {
                            is_min = false;
                            break 'nbr;
                        }
                    }
                }
            }
            if is_min {
                seeds.push((i as f64 * h, j as f64 * h));
            }
        }
    }
    Ok(seeds)
}

pub fn refine(sc: &SampledCurve, seed: (f64, f64), triple: &AngleTriple) -> Result<Inscription> {
    refine_with(sc, seed, &PairMap::Cyclic(*triple))
}

/// Damped Gauss-Newton on the residual with a central-difference Jacobian.
///
/// Rank-deficient Jacobians (a curve that is itself a circle has a whole family
/// of solutions) are handled by the SVD least-squares step.
pub fn refine_with(sc: &SampledCurve, seed: (f64, f64), map: &PairMap) -> Result<Inscription> {
    let wrap = |x: Vector2<f64>| Vector2::new(x[0].rem_euclid(1.0), x[1].rem_euclid(1.0));
    let mut x = wrap(Vector2::new(seed.0, seed.1));
    if torus_distance(x[0], x[1]) < DIAGONAL_BAND {
        return Err(Error::DiagonalCollapse);
    }
    let eval = |x: &Vector2<f64>| -> Result<Vector2<f64>> {
        let r = residual_with(sc, x[0], x[1], map).map_err(|e| match e {
            Error::NearDiagonal { .. } => Error::DiagonalCollapse,
            e => e,
        })?;
        Ok(Vector2::new(r[0], r[1]))
    };
    let mut f = eval(&x)?;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && f.norm() > TARGET_RESIDUAL {
        iterations += 1;
        let mut jac = Matrix2::zeros();
        for k in 0..2 {
            let mut e = Vector2::zeros();
            e[k] = JACOBIAN_STEP;
            let col = (eval(&(x + e))? - eval(&(x - e))?) / (2.0 * JACOBIAN_STEP);
            jac.set_column(k, &col);
        }
        let svd = jac.svd(true, true);
        let cutoff = 1e-10 * svd.singular_values.max();
        let Ok(step) = svd.solve(&(-f), cutoff) else { break };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = wrap(x + step * lambda);
            if let Ok(ft) = eval(&trial) {
                if ft.norm() < f.norm() {
                    (x, f) = (trial, ft);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let best = f.norm();
    if !(best < RESIDUAL_TOLERANCE) {
        return Err(Error::NonConvergence { best, iterations });
    }
    let surface = sc.surface();
    let raw = map.apply(surface, &sc.eval(x[0]), &sc.eval(x[1]))?;
    let params = [x[0], sc.foot(&raw.p2).param, x[1], sc.foot(&raw.q2).param];
    for a in 0..4 {
        for b in a + 1..4 {
            if torus_distance(params[a], params[b]) < DISTINCT_TOLERANCE {
                return Err(Error::DiagonalCollapse);
            }
        }
    }
    Ok(Inscription {
        params,
        circle: CirclePair::from_raw(surface, raw.x, raw.v),
        triple: map.triple(),
        residual: best,
        iterations,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub grid: usize,
    pub candidates: usize,
    pub skipped: usize,
    pub converged: usize,
    pub duplicates: usize,
    pub rejected: usize,
    pub failures: usize,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub inscriptions: Vec<Inscription>,
    pub stats: SearchStats,
}

/// Grid scan, refinement of every seed, deduplication and validation.
pub fn find_inscriptions(sc: &SampledCurve, map: &PairMap, grid: usize) -> Result<SearchOutcome> {
    let seeds = grid_scan_with(sc, map, grid)?;
    let mut stats = SearchStats {
        grid,
        candidates: seeds.len(),
        ..SearchStats::default()
    };
    let near = 1.5 / grid as f64;
    let mut found: Vec<Inscription> = Vec::new();
    for seed in seeds {
        if found
            .iter()
            .any(|f| torus_distance(f.params[0], seed.0) < near && torus_distance(f.params[2], seed.1) < near)
        {
            stats.skipped += 1;
            continue;
        }
        let ins = match refine_with(sc, seed, map) {
            Ok(ins) => ins,
            Err(_) => {
                stats.failures += 1;
                continue;
            }
        };
        stats.converged += 1;
        if found.iter().any(|f| {
            torus_distance(f.params[0], ins.params[0]) < DEDUP_TOLERANCE
                && torus_distance(f.params[2], ins.params[2]) < DEDUP_TOLERANCE
        }) {
            stats.duplicates += 1;
            continue;
        }
        if !validate_inscription(&ins, sc).passed() {
            stats.rejected += 1;
            continue;
        }
        found.push(ins);
    }
    found.sort_by(|a, b| {
        a.params[0]
            .total_cmp(&b.params[0])
            .then(a.params[2].total_cmp(&b.params[2]))
    });
    Ok(SearchOutcome {
        inscriptions: found,
        stats,
    })
}

/// Type-`θ` rectangles on a spherical curve of diameter below `π`, via the rotation flow.
pub fn rectangle_search_sphere(sc: &SampledCurve, theta: f64) -> Result<Vec<Inscription>> {
    Ok(rectangle_search_sphere_with(sc, theta, DEFAULT_GRID)?.inscriptions)
}

pub fn rectangle_search_sphere_with(sc: &SampledCurve, theta: f64, grid: usize) -> Result<SearchOutcome> {
    if sc.surface() != Surface::Spherical {
        return Err(Error::UnsupportedSurface(sc.surface()));
    }
    if !(sc.diameter() < PI) {
        return Err(Error::DiameterTooLarge {
            diameter: sc.diameter(),
        });
    }
    find_inscriptions(sc, &PairMap::rectangle_flow(theta)?, grid)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Recomputes every property of `ins` from the curve.
pub fn validate_inscription(ins: &Inscription, sc: &SampledCurve) -> ValidationReport {
    let s = sc.surface();
    let x = ins.circle.center().coords();
    let v = ins.circle.radial().vec();
    let r = ins.circle.radius();
    let pts = ins.params.map(|u| sc.eval(u));
    let pattern = ins.triple.vertex_angles();
    let mut equidistance: f64 = 0.0;
    let mut angle: f64 = 0.0;
    let mut on_curve: f64 = 0.0;
    for k in 0..4 {
        equidistance = equidistance.max((s.dist(x, &pts[k]) - r).abs());
        let a = match s.log(x, &pts[k]) {
            Ok(w) => wrap_signed(s.oriented_angle(x, v, &w) - pattern[k]).abs(),
            Err(_) => f64::INFINITY,
        };
        angle = angle.max(a);
        on_curve = on_curve.max(s.dist(ins.circle.point_at(pattern[k]).coords(), &pts[k]));
    }
    let mut separation = f64::INFINITY;
    for a in 0..4 {
        for b in a + 1..4 {
            separation = separation.min(torus_distance(ins.params[a], ins.params[b]));
        }
    }
    let check = |name, value: f64, tolerance| Check {
        name,
        value,
        tolerance,
        passed: value < tolerance,
    };
    ValidationReport {
        checks: vec![
            check("residual", ins.residual, RESIDUAL_TOLERANCE),
            check("equidistance", equidistance, VALIDATION_TOLERANCE),
            check("angle-pattern", angle, VALIDATION_TOLERANCE),
            check("on-curve", on_curve, VALIDATION_TOLERANCE),
            Check {
                name: "distinct",
                value: separation,
                tolerance: DISTINCT_TOLERANCE,
                passed: separation > DISTINCT_TOLERANCE,
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::tests::{disk, perturbed_disk_circle};
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn rect() -> AngleTriple {
        AngleTriple::rectangle(FRAC_PI_2).unwrap()
    }

    #[test]
    fn circle_residual_vanishes_on_family() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let t = AngleTriple::new(PI / 3.0, PI / 2.0, PI / 2.0).unwrap();
        // q sits a quarter turn after p on a circle centered at the origin.
        for s in [0.0, 0.1, 0.37, 0.81] {
            let r = residual(&sc, s, s + 0.25, &t).unwrap();
            assert!(r.0.abs() < 1e-9 && r.1.abs() < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn residual_rejects_diagonal() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        assert!(matches!(
            residual(&sc, 0.3, 0.3 + 5e-5, &rect()),
            Err(Error::NearDiagonal { .. })
        ));
    }

    #[test]
    fn residual_is_continuous_on_grid() {
        let sc = perturbed_disk_circle(512, 0.5, 0.05, 3.0);
        let t = rect();
        let n = 128;
        let h = 1.0 / n as f64;
        for i in 0..n {
            let s = i as f64 * h;
            let t0 = s + 0.3;
            let a = residual(&sc, s, t0, &t).unwrap();
            let b = residual(&sc, s + h, t0, &t).unwrap();
            let c = residual(&sc, s, t0 + h, &t).unwrap();
            // Lipschitz constant of the map is bounded by a few curve lengths.
            for (x, y) in [(a, b), (a, c)] {
                assert!((x.0 - y.0).abs() < 20.0 * h && (x.1 - y.1).abs() < 20.0 * h);
            }
        }
    }

    #[test]
    fn residual_is_shift_invariant() {
        let sc = perturbed_disk_circle(512, 0.5, 0.05, 3.0);
        let shifted = sc.rotated(64);
        let off = 64.0 / 512.0;
        for (s, t) in [(0.1, 0.5), (0.3, 0.9), (0.7, 0.2)] {
            let a = residual(&sc, s + off, t + off, &rect()).unwrap();
            let b = residual(&shifted, s, t, &rect()).unwrap();
            assert!((a.0 - b.0).abs() < 1e-10 && (a.1 - b.1).abs() < 1e-10);
        }
    }

    #[test]
    fn grid_requires_minimum_size() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        assert!(matches!(grid_scan(&sc, &rect(), 32), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn circle_grid_has_a_family_of_seeds() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let seeds = grid_scan(&sc, &rect(), 128).unwrap();
        // Every seed lies near the line t = s + 1/2.
        assert!(seeds.len() >= 64, "{}", seeds.len());
        assert!(seeds
            .iter()
            .all(|&(s, t)| (torus_distance(t, s) - 0.5).abs() < 3.0 / 128.0));
    }

    #[test]
    fn refine_on_exact_circle_is_fast() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let ins = refine(&sc, (0.2, 0.7 + 1e-6), &rect()).unwrap();
        assert!(ins.iterations <= 2, "{}", ins.iterations);
        assert!(validate_inscription(&ins, &sc).passed());
    }

    #[test]
    fn refine_rejects_diagonal_seed() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        assert!(matches!(refine(&sc, (0.4, 0.4), &rect()), Err(Error::DiagonalCollapse)));
    }

    #[test]
    fn perturbed_circle_has_a_square() {
        let sc = perturbed_disk_circle(1024, 0.5, 0.05, 3.0);
        let out = find_inscriptions(&sc, &PairMap::Cyclic(rect()), 128).unwrap();
        assert!(!out.inscriptions.is_empty(), "{:?}", out.stats);
        for ins in &out.inscriptions {
            let report = validate_inscription(ins, &sc);
            assert!(report.passed(), "{report:?}");
            assert!(ins.residual < 1e-8);
        }
    }

    #[test]
    fn ellipse_square_is_axis_symmetric() {
        let (a, b) = (2.0, 1.0);
        let sc = SampledCurve::from_fn(Surface::Euclidean, 1024, |t| {
            Vec3::new(a * (TAU * t).cos(), b * (TAU * t).sin(), 0.0)
        })
        .unwrap();
        let out = find_inscriptions(&sc, &PairMap::Cyclic(rect()), 128).unwrap();
        let c = a * b / (a * a + b * b).sqrt();
        let square = out.inscriptions.iter().find(|ins| {
            ins.vertices(&sc)
                .iter()
                .all(|p| (p.coords().x.abs() - c).abs() < 1e-8 && (p.coords().y.abs() - c).abs() < 1e-8)
        });
        assert!(square.is_some(), "{:?}", out.stats);
        assert!(square.unwrap().circle.center().coords().norm() < 1e-8);
    }

    #[test]
    fn sphere_rectangles_on_perturbed_latitude() {
        let sc = SampledCurve::from_fn(Surface::Spherical, 1024, |t| {
            let rho = 1.0 + 0.05 * (2.0 * TAU * t).cos();
            Vec3::new(rho.sin() * (TAU * t).cos(), rho.sin() * (TAU * t).sin(), rho.cos())
        })
        .unwrap();
        let out = rectangle_search_sphere_with(&sc, FRAC_PI_2, 128).unwrap();
        assert!(!out.inscriptions.is_empty(), "{:?}", out.stats);
        for ins in &out.inscriptions {
            assert!(validate_inscription(ins, &sc).passed());
        }
    }

    #[test]
    fn sphere_search_needs_small_diameter() {
        let big = SampledCurve::from_fn(Surface::Spherical, 512, |t| {
            let rho = PI / 2.0 + 0.2 * (TAU * t).cos();
            Vec3::new(rho.sin() * (TAU * t).cos(), rho.sin() * (TAU * t).sin(), rho.cos())
        })
        .unwrap();
        assert!(matches!(
            rectangle_search_sphere(&big, 1.0),
            Err(Error::DiameterTooLarge { .. })
        ));
        let flat = perturbed_disk_circle(256, 0.5, 0.0, 0.0);
        assert!(matches!(
            rectangle_search_sphere(&flat, 1.0),
            Err(Error::UnsupportedSurface(_))
        ));
    }

    #[test]
    fn validator_catches_jitter_and_diagonal() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let ins = refine(&sc, (0.2, 0.7 + 1e-6), &rect()).unwrap();
        let mut bad = ins;
        bad.params[1] += 1e-5;
        assert!(!validate_inscription(&bad, &sc).passed());
        let mut diag = ins;
        diag.params = [0.3; 4];
        let report = validate_inscription(&diag, &sc);
        assert!(report.failures().any(|c| c.name == "distinct"));
    }

    #[test]
    fn disk_helper_lands_on_hyperboloid() {
        let p = disk(0.3, -0.4);
        assert!((Surface::Hyperbolic.inner(&p, &p) + 1.0).abs() < 1e-14);
    }
}
