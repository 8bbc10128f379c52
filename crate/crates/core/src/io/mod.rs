//! Curve specs, chart conversions, result records and figures.

pub mod chart;
pub mod record;
pub mod spec;
pub mod svg;

pub use chart::Chart;
pub use record::{Diagnostics, InscriptionRecord, OracleSummary, Provenance, ResultRecord, SCHEMA_VERSION};
pub use spec::{load_curve, parse_curve, parse_curve_spec, CurveSpec, Family};
pub use svg::{render_svg, write_svg};
