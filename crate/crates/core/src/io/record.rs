//! Machine-readable search results (JSON).

use serde::{Deserialize, Serialize};

use super::chart::{from_model, Chart};
use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::geometry::{Surface, Vec3};
use crate::inscribe::oracle::OracleMinimum;
use crate::inscribe::{Inscription, SearchStats};
use crate::quad::CirclePair;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InscriptionRecord {
    pub params: [f64; 4],
    /// Circle center in model coordinates.
    pub center: [f64; 3],
    /// Circle center in the record's chart.
    pub center_chart: Vec<f64>,
    /// Radial vector at the center, pointing at the first vertex.
    pub radial: [f64; 3],
    pub radius: f64,
    pub triple: [f64; 3],
    pub residual: f64,
    pub iterations: usize,
    /// The four vertices in the record's chart.
    pub vertices: Vec<Vec<f64>>,
}

impl InscriptionRecord {
    pub fn new(ins: &Inscription, sc: &SampledCurve, chart: Chart) -> Self {
        let s = sc.surface();
        let x = ins.circle.center().coords();
        let v = ins.circle.radial().vec();
        Self {
            params: ins.params,
            center: [x.x, x.y, x.z],
            center_chart: from_model(s, chart, x),
            radial: [v.x, v.y, v.z],
            radius: ins.circle.radius(),
            triple: ins.triple.into(),
            residual: ins.residual,
            iterations: ins.iterations,
            vertices: ins
                .vertices(sc)
                .iter()
                .map(|p| from_model(s, chart, p.coords()))
                .collect(),
        }
    }

    pub fn circle(&self, surface: Surface) -> CirclePair {
        let x = surface.project_point(&Vec3::from(self.center));
        CirclePair::from_raw(surface, x, surface.project_tangent(&x, &Vec3::from(self.radial)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diagnostics {
    pub search: Option<SearchStats>,
    #[serde(default)]
    pub oracle: Option<OracleSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSummary {
    pub grid: usize,
    pub minima: Vec<OracleMinimumRecord>,
    /// Every solver result lies within `tolerance` of an oracle minimum and vice versa.
    pub agrees: bool,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleMinimumRecord {
    pub s: f64,
    pub t: f64,
    pub value: f64,
}

impl From<OracleMinimum> for OracleMinimumRecord {
    fn from(m: OracleMinimum) -> Self {
        Self {
            s: m.s,
            t: m.t,
            value: m.value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub args: Vec<String>,
}

impl Provenance {
    pub fn current(args: Vec<String>) -> Self {
        Self {
            tool: "quadscribe".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            args,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRecord {
    pub schema_version: u32,
    pub surface: Surface,
    pub chart: Chart,
    pub inscriptions: Vec<InscriptionRecord>,
    pub diagnostics: Diagnostics,
    pub provenance: Provenance,
}

impl ResultRecord {
    pub fn new(surface: Surface, chart: Chart, provenance: Provenance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            surface,
            chart,
            inscriptions: Vec::new(),
            diagnostics: Diagnostics::default(),
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("records serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: Self = serde_json::from_str(text).map_err(|e| Error::Record(e.to_string()))?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(Error::Record(format!(
                "unsupported schema version {}, expected {SCHEMA_VERSION}",
                record.schema_version
            )));
        }
        Ok(record)
    }
}
