//! SVG figures: the curve, inscribed quadrilaterals, their circles and radii.

use std::fmt::Write as _;
use std::path::Path;

use super::chart::{disk_to_half_plane, hyperboloid_to_disk, sphere_to_stereographic, Chart};
use super::record::ResultRecord;
use crate::curve::SampledCurve;
use crate::error::Result;
use crate::geometry::{Surface, Vec3};

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;
const CIRCLE_STEPS: usize = 256;
const RADIUS_STEPS: usize = 32;

fn project(surface: Surface, chart: Chart, p: &Vec3) -> [f64; 2] {
    match (surface, chart) {
        (Surface::Hyperbolic, Chart::UpperHalfPlane) => disk_to_half_plane(hyperboloid_to_disk(p)),
        (Surface::Hyperbolic, _) => hyperboloid_to_disk(p),
        (Surface::Spherical, Chart::EmbeddedR3) => [p.x, p.y],
        (Surface::Spherical, _) => sphere_to_stereographic(p),
        (Surface::Euclidean, _) => [p.x, p.y],
    }
}

struct View {
    min: [f64; 2],
    scale: f64,
}

impl View {
    fn fit(points: &[[f64; 2]]) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9);
        Self {
            min: lo,
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (
            MARGIN + (p[0] - self.min[0]) * self.scale,
            SIZE - MARGIN - (p[1] - self.min[1]) * self.scale,
        )
    }

    fn path(&self, pts: &[[f64; 2]]) -> String {
        let mut out = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = self.map(*p);
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{x:.3},{y:.3}");
        }
        out
    }
}

/// Renders `sc` and, if given, every inscription of `results`.
pub fn render_svg(sc: &SampledCurve, chart: Chart, results: Option<&ResultRecord>) -> String {
    let s = sc.surface();
    let curve: Vec<[f64; 2]> = sc.points().iter().map(|p| project(s, chart, p.coords())).collect();
    let circles: Vec<_> = results
        .map(|r| r.inscriptions.iter().map(|i| (i, i.circle(s))).collect())
        .unwrap_or_default();
    let mut circle_paths = Vec::new();
    for (_, circle) in &circles {
        let pts: Vec<[f64; 2]> = (0..CIRCLE_STEPS)
            .map(|k| {
                project(
                    s,
                    chart,
                    circle
                        .point_at(std::f64::consts::TAU * k as f64 / CIRCLE_STEPS as f64)
                        .coords(),
                )
            })
            .collect();
        circle_paths.push(pts);
    }
    let boundary_disk = matches!(
        (s, chart),
        (Surface::Hyperbolic, Chart::PoincareDisk | Chart::EmbeddedR3)
            | (Surface::Spherical, Chart::EmbeddedR3 | Chart::Stereographic)
    );
    let mut extent: Vec<[f64; 2]> = curve.clone();
    extent.extend(circle_paths.iter().flatten());
    if boundary_disk {
        extent.extend([[-1.0, -1.0], [1.0, 1.0]]);
    }
    let view = View::fit(&extent);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    svg.push_str(
        "<style>.curve{fill:none;stroke:#222;stroke-width:1.5}.boundary{fill:none;stroke:#999}\
.geodesic-circle{fill:none;stroke:#1f77b4}.radius{stroke:#1f77b4;stroke-dasharray:4 3;fill:none}\
.vertex{fill:#d62728}.center{fill:#1f77b4}</style>\n",
    );
    if boundary_disk {
        let (cx, cy) = view.map([0.0, 0.0]);
        let _ = writeln!(
            svg,
            r#"<circle class="boundary" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}"/>"#,
            view.scale
        );
    } else if s == Surface::Hyperbolic {
        let (x0, y0) = view.map([view.min[0], 0.0]);
        let (x1, _) = view.map([view.min[0] + (SIZE - 2.0 * MARGIN) / view.scale, 0.0]);
        let _ = writeln!(
            svg,
            r#"<line class="boundary" x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}"/>"#
        );
    }
    let _ = writeln!(svg, r#"<polygon class="curve" points="{}"/>"#, view.path(&curve));
    for ((record, circle), path) in circles.iter().zip(&circle_paths) {
        svg.push_str("<g class=\"inscription\">\n");
        let _ = writeln!(
            svg,
            r#"<polygon class="geodesic-circle" points="{}"/>"#,
            view.path(path)
        );
        let x = circle.center().coords();
        let angles = record.triple_angles();
        for a in angles {
            let w = s.rotate(x, circle.radial().vec(), a);
            let pts: Vec<[f64; 2]> = (0..=RADIUS_STEPS)
                .map(|k| project(s, chart, &s.exp(x, &(w * (k as f64 / RADIUS_STEPS as f64)))))
                .collect();
            let _ = writeln!(svg, r#"<polyline class="radius" points="{}"/>"#, view.path(&pts));
        }
        let (cx, cy) = view.map(project(s, chart, x));
        let _ = writeln!(svg, r#"<circle class="center" cx="{cx:.3}" cy="{cy:.3}" r="3"/>"#);
        for u in record.params {
            let (vx, vy) = view.map(project(s, chart, sc.point_at(u).coords()));
            let _ = writeln!(svg, r#"<circle class="vertex" cx="{vx:.3}" cy="{vy:.3}" r="4"/>"#);
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(path: &Path, sc: &SampledCurve, chart: Chart, results: Option<&ResultRecord>) -> Result<()> {
    std::fs::write(path, render_svg(sc, chart, results))?;
    Ok(())
}

impl super::record::InscriptionRecord {
    /// Vertex angles `(0, θ, φ1, φ2 + θ)` of the record's triple.
    fn triple_angles(&self) -> [f64; 4] {
        let [theta, phi1, phi2] = self.triple;
        [0.0, theta, phi1, phi2 + theta]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::tests::perturbed_disk_circle;
    use crate::inscribe::refine;
    use crate::io::record::{InscriptionRecord, Provenance};
    use crate::quad::AngleTriple;

    fn record_for(sc: &SampledCurve) -> ResultRecord {
        let ins = refine(sc, (0.2, 0.7 + 1e-6), &AngleTriple::rectangle(1.0).unwrap()).unwrap();
        let mut record = ResultRecord::new(Surface::Hyperbolic, Chart::PoincareDisk, Provenance::current(vec![]));
        record
            .inscriptions
            .push(InscriptionRecord::new(&ins, sc, Chart::PoincareDisk));
        record
    }

    #[test]
    fn empty_results_draw_only_the_curve() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        let svg = render_svg(&sc, Chart::PoincareDisk, None);
        assert_eq!(svg.matches(r#"class="curve""#).count(), 1);
        assert_eq!(svg.matches(r#"class="boundary""#).count(), 1);
        assert_eq!(svg.matches(r#"class="vertex""#).count(), 0);
    }

    #[test]
    fn one_inscription_structure() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let svg = render_svg(&sc, Chart::PoincareDisk, Some(&record_for(&sc)));
        assert_eq!(svg.matches(r#"class="vertex""#).count(), 4);
        assert_eq!(svg.matches(r#"class="geodesic-circle""#).count(), 1);
        assert_eq!(svg.matches(r#"class="radius""#).count(), 4);
        assert_eq!(svg.matches(r#"class="center""#).count(), 1);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn output_is_deterministic() {
        let sc = perturbed_disk_circle(512, 0.5, 0.0, 0.0);
        let record = record_for(&sc);
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        write_svg(&a, &sc, Chart::PoincareDisk, Some(&record)).unwrap();
        write_svg(&b, &sc, Chart::PoincareDisk, Some(&record)).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn sphere_figures_have_an_outline() {
        let sc = SampledCurve::from_fn(Surface::Spherical, 128, |t| {
            let a = std::f64::consts::TAU * t;
            Vec3::new(0.5 * a.cos(), 0.5 * a.sin(), 0.75f64.sqrt())
        })
        .unwrap();
        for chart in [Chart::Stereographic, Chart::EmbeddedR3] {
            assert_eq!(render_svg(&sc, chart, None).matches(r#"class="boundary""#).count(), 1);
        }
    }

    #[test]
    fn half_plane_draws_the_real_axis() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        let svg = render_svg(&sc, Chart::UpperHalfPlane, None);
        assert!(svg.contains(r#"<line class="boundary""#));
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let sc = perturbed_disk_circle(256, 0.5, 0.05, 3.0);
        assert!(write_svg(Path::new("/nonexistent/dir/x.svg"), &sc, Chart::PoincareDisk, None).is_err());
    }
}
