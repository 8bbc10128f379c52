//! Curve specification files (TOML).
//!
//! ```toml
//! version = 1
//! surface = "hyperbolic"          # hyperbolic | spherical | euclidean
//! chart = "poincare-disk"         # poincare-disk | upper-half-plane | stereographic | embedded-r3 | plane
//! family = "fourier-radial"       # circle | fourier-radial | point-list
//! center = [0.0, 0.0]
//! radius = 0.5
//! cos = [0.0, 0.0, 0.05]          # a_k, k = 1, 2, ...
//! sin = []                        # b_k
//! samples = 1024
//! ```
//!
//! `fourier-radial` traces `r(t) = radius + Σ a_k cos(2πkt) + b_k sin(2πkt)`
//! around `center`. In the flat charts the radius is measured in chart units;
//! in `embedded-r3` it is a geodesic radius about the model point `center`.
//! `point-list` takes `points = [[...], ...]` in chart coordinates.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chart::{to_model, Chart};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::geometry::{Surface, SurfacePoint, Vec3};

pub const SPEC_VERSION: u32 = 1;
pub const DEFAULT_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Circle,
    FourierRadial,
    PointList,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub version: u32,
    pub surface: Surface,
    pub chart: Chart,
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cos: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sin: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

pub fn parse_curve_spec(text: &str) -> Result<CurveSpec> {
    let spec: CurveSpec = toml::from_str(text).map_err(|e| Error::Spec(e.message().to_string()))?;
    if spec.version != SPEC_VERSION {
        return Err(Error::Spec(format!(
            "unsupported version {}, expected {SPEC_VERSION}",
            spec.version
        )));
    }
    if !spec.chart.supports(spec.surface) {
        return Err(Error::Spec(format!(
            "chart {} does not apply to the {} surface",
            spec.chart.name(),
            spec.surface.name()
        )));
    }
    Ok(spec)
}

/// Parses a spec and samples its curve.
pub fn parse_curve(text: &str) -> Result<SampledCurve> {
    parse_curve_spec(text)?.sample()
}

pub fn load_curve(path: &Path) -> Result<(CurveSpec, SampledCurve)> {
    let text = std::fs::read_to_string(path)?;
    let spec = parse_curve_spec(&text)?;
    let curve = spec.sample()?;
    Ok((spec, curve))
}

impl CurveSpec {
    fn radial(&self) -> Result<impl Fn(f64) -> f64 + '_> {
        let r0 = self.radius.ok_or_else(|| Error::Spec("missing radius".into()))?;
        if !(r0 > 0.0) || !r0.is_finite() {
            return Err(Error::Spec(format!("radius must be positive, got {r0}")));
        }
        if self.family == Family::Circle && !(self.cos.is_empty() && self.sin.is_empty()) {
            return Err(Error::Spec("circle family takes no coefficients".into()));
        }
        let total: f64 = self.cos.iter().chain(&self.sin).map(|c| c.abs()).sum();
        if !total.is_finite() || total >= r0 {
            return Err(Error::Spec(format!(
                "sum of coefficient magnitudes {total} must be below the radius {r0}"
            )));
        }
        Ok(move |t: f64| {
            let mut r = r0;
            for (k, a) in self.cos.iter().enumerate() {
                r += a * (TAU * (k + 1) as f64 * t).cos();
            }
            for (k, b) in self.sin.iter().enumerate() {
                r += b * (TAU * (k + 1) as f64 * t).sin();
            }
            r
        })
    }

    fn center(&self) -> Result<Vec<f64>> {
        let c = self.center.clone().unwrap_or_else(|| match self.chart {
            Chart::EmbeddedR3 => self.surface.origin_coords().iter().copied().collect(),
            Chart::UpperHalfPlane => vec![0.0, 1.0],
            _ => vec![0.0, 0.0],
        });
        if c.len() != self.chart.dim() {
            return Err(Error::Spec(format!(
                "center has {} coordinates, chart {} takes {}",
                c.len(),
                self.chart.name(),
                self.chart.dim()
            )));
        }
        Ok(c)
    }

    /// Model points of the curve.
    pub fn model_points(&self) -> Result<Vec<Vec3>> {
        let s = self.surface;
        match self.family {
            Family::PointList => {
                if self.radius.is_some() || self.center.is_some() || !self.cos.is_empty() || !self.sin.is_empty() {
                    return Err(Error::Spec("point-list takes only points".into()));
                }
                let pts = self
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::Spec("missing points".into()))?;
                pts.iter().map(|c| to_model(s, self.chart, c)).collect()
            }
            Family::Circle | Family::FourierRadial => {
                if self.points.is_some() {
                    return Err(Error::Spec(format!("{:?} family takes no points", self.family)));
                }
                let n = self.samples;
                let r = self.radial()?;
                let c = self.center()?;
                if self.chart == Chart::EmbeddedR3 {
                    let x = to_model(s, self.chart, &c)?;
                    let frame = crate::geometry::FrameAtPoint::new(&crate::geometry::TangentVector::project(
                        SurfacePoint::project(s, x)?,
                        best_axis(s, &x),
                    ))?;
                    if s == Surface::Spherical && (0..n).any(|i| r(i as f64 / n as f64) >= std::f64::consts::PI) {
                        return Err(Error::Spec("geodesic radius must stay below pi".into()));
                    }
                    (0..n)
                        .map(|i| {
                            let t = i as f64 / n as f64;
                            let v = frame.vector(r(t) * (TAU * t).cos(), r(t) * (TAU * t).sin());
                            Ok(s.exp(&x, v.vec()))
                        })
                        .collect()
                } else {
                    (0..n)
                        .map(|i| {
                            let t = i as f64 / n as f64;
                            let (a, b) = (TAU * t).sin_cos();
                            to_model(s, self.chart, &[c[0] + r(t) * b, c[1] + r(t) * a])
                        })
                        .collect()
                }
            }
        }
    }

    pub fn sample(&self) -> Result<SampledCurve> {
        let s = self.surface;
        let points = self
            .model_points()?
            .into_iter()
            .map(|p| SurfacePoint::project(s, p))
            .collect::<Result<Vec<_>>>()?;
        let n = points.len();
        for i in 0..n {
            for j in i + 1..n {
                if s.dist(points[i].coords(), points[j].coords()) < 1e-12 {
                    return Err(Error::Spec(format!("points {i} and {j} coincide")));
                }
            }
        }
        SampledCurve::new(s, points)
    }
}

fn best_axis(s: Surface, x: &Vec3) -> Vec3 {
    [Vec3::y(), Vec3::z(), Vec3::x()]
        .into_iter()
        .map(|a| s.project_tangent(x, &a))
        .max_by(|a, b| s.norm(a).total_cmp(&s.norm(b)))
        .expect("three axes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"
version = 1
surface = "hyperbolic"
chart = "poincare-disk"
family = "circle"
center = [0.0, 0.0]
radius = 0.5
"#;

    #[test]
    fn disk_circle_has_expected_radius() {
        let sc = parse_curve(CIRCLE).unwrap();
        assert_eq!(sc.len(), 1024);
        let o = Surface::Hyperbolic.origin_coords();
        let r = 2.0 * 0.5f64.atanh();
        assert!((r - 1.0986122886681098).abs() < 1e-12);
        for p in sc.points() {
            assert!((Surface::Hyperbolic.dist(&o, p.coords()) - r).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_match_circle() {
        let fourier = CIRCLE.replace("\"circle\"", "\"fourier-radial\"") + "cos = [0.0, 0.0]\nsin = [0.0]\n";
        let a = parse_curve(CIRCLE).unwrap();
        let b = parse_curve(&fourier).unwrap();
        for (p, q) in a.points().iter().zip(b.points()) {
            assert_eq!(p.coords(), q.coords());
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let cases = [
            CIRCLE.replace("version = 1", "version = 2"),
            CIRCLE.replace("radius = 0.5", "radius = 1.5"),
            CIRCLE.replace("radius = 0.5", "radius = -0.5"),
            CIRCLE.to_string() + "colour = \"red\"\n",
            CIRCLE.replace("\"circle\"", "\"fourier-radial\"") + "cos = [0.3, 0.3]\n",
            CIRCLE.replace("\"poincare-disk\"", "\"stereographic\""),
            CIRCLE.replace("center = [0.0, 0.0]", "center = [0.0, 0.0, 1.0]"),
            CIRCLE.replace("samples", "x") + "samples = 16\n",
            "version = 1\nsurface = \"euclidean\"\nchart = \"plane\"\nfamily = \"point-list\"\n".to_string(),
            CIRCLE.replace("surface", "surfce"),
        ];
        for text in cases {
            assert!(parse_curve(&text).is_err(), "{text}");
        }
    }

    #[test]
    fn point_list_rejects_repeats() {
        let mut pts: Vec<String> = (0..100)
            .map(|i| {
                let a = TAU * i as f64 / 100.0;
                format!("[{}, {}]", a.cos(), a.sin())
            })
            .collect();
        let ok = format!(
            "version = 1\nsurface = \"plane\"\nchart = \"plane\"\nfamily = \"point-list\"\npoints = [{}]\n",
            pts.join(", ")
        );
        assert_eq!(parse_curve(&ok).unwrap().len(), 100);
        pts[50] = pts[10].clone();
        let bad = format!(
            "version = 1\nsurface = \"plane\"\nchart = \"plane\"\nfamily = \"point-list\"\npoints = [{}]\n",
            pts.join(", ")
        );
        assert!(matches!(parse_curve(&bad), Err(Error::Spec(_))));
    }

    #[test]
    fn embedded_sphere_latitude() {
        let text = "version = 1\nsurface = \"sphere\"\nchart = \"embedded-r3\"\nfamily = \"circle\"\ncenter = [0.0, 0.0, 1.0]\nradius = 1.0\nsamples = 256\n";
        let sc = parse_curve(text).unwrap();
        for p in sc.points() {
            assert!((p.coords().z - 1f64.cos()).abs() < 1e-14);
        }
        assert!((sc.diameter() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_plane_circle_samples() {
        let text = "version = 1\nsurface = \"hyperbolic\"\nchart = \"upper-half-plane\"\nfamily = \"circle\"\ncenter = [0.0, 2.0]\nradius = 1.0\n";
        let sc = parse_curve(text).unwrap();
        assert_eq!(sc.len(), 1024);
        let dip = "version = 1\nsurface = \"hyperbolic\"\nchart = \"upper-half-plane\"\nfamily = \"circle\"\ncenter = [0.0, 0.5]\nradius = 1.0\n";
        assert!(parse_curve(dip).is_err());
    }
}
