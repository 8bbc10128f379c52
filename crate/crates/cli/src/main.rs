//! `quadscribe`: inscribed cyclic quadrilaterals and rectangles from the command line.
//!
//! Exit status: 0 on success, 1 when a tolerance or hypothesis is violated or
//! nothing is found, 2 on usage errors and malformed input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadscribe_core::io::Chart;

#[derive(Parser, Debug)]
#[command(
    name = "quadscribe",
    version,
    about = "Inscribed cyclic quadrilaterals on constant-curvature surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Numerical checks of the pullback identity.
    Verify {
        #[command(subcommand)]
        what: VerifyCommand,
    },
    /// Search a curve for inscribed quadrilaterals of a given type.
    Inscribe(InscribeArgs),
    /// Move a pair of points along the rectangle flow.
    Flow(FlowArgs),
    /// Draw a curve and, optionally, saved inscriptions as SVG.
    Render(RenderArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Block structure of the pulled-back form and its geometric counterpart.
    Pullback(PullbackArgs),
}

#[derive(Args, Debug)]
struct PullbackArgs {
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: f64,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi1: f64,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    phi2: f64,
    /// Random states for the geometric check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

#[derive(Args, Debug)]
struct InscribeArgs {
    /// Curve spec (TOML).
    #[arg(long)]
    curve: PathBuf,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: f64,
    /// Defaults to pi together with --phi2, giving a rectangle.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, requires = "phi2")]
    phi1: Option<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true, requires = "phi1")]
    phi2: Option<f64>,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Use the rectangle flow instead of the cyclic quadrilateral map.
    /// This is the default for rectangles on the sphere.
    #[arg(long, conflicts_with_all = ["phi1", "phi2"])]
    flow: bool,
    /// Cross-check the results against the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 512)]
    oracle_grid: usize,
    /// Write the result record (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a figure here.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FlowSurface {
    Sphere,
    Hyperbolic,
}

#[derive(Args, Debug)]
struct FlowArgs {
    #[arg(long, value_enum)]
    surface: FlowSurface,
    /// First point, comma separated, in --chart coordinates.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_coords)]
    p: Vec<f64>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', value_parser = parse_coords)]
    q: Vec<f64>,
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    theta: f64,
    /// Also integrate the vector field and compare.
    #[arg(long)]
    ode: bool,
    #[arg(long, default_value_t = 1e-3, requires = "ode")]
    step: f64,
    #[arg(long, value_enum, default_value_t = ChartArg::EmbeddedR3)]
    chart: ChartArg,
    /// Largest accepted ODE discrepancy and energy drift.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    curve: PathBuf,
    /// Result record written by `inscribe --out`.
    #[arg(long)]
    results: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Chart of the figure; defaults to the curve spec's chart.
    #[arg(long, value_enum)]
    chart: Option<ChartArg>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ChartArg {
    PoincareDisk,
    UpperHalfPlane,
    Stereographic,
    EmbeddedR3,
    Plane,
}

impl From<ChartArg> for Chart {
    fn from(c: ChartArg) -> Self {
        match c {
            ChartArg::PoincareDisk => Chart::PoincareDisk,
            ChartArg::UpperHalfPlane => Chart::UpperHalfPlane,
            ChartArg::Stereographic => Chart::Stereographic,
            ChartArg::EmbeddedR3 => Chart::EmbeddedR3,
            ChartArg::Plane => Chart::Plane,
        }
    }
}

/// Radians only.
fn parse_angle(s: &str) -> Result<f64, String> {
    let lower = s.to_ascii_lowercase();
    if lower.contains("deg") || s.contains('°') {
        return Err("angles are given in radians; degrees are not accepted".into());
    }
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !v.is_finite() {
        return Err(format!("angle must be finite, got {s}"));
    }
    Ok(v)
}

fn parse_coords(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !v.is_finite() {
        return Err(format!("coordinate must be finite, got {s}"));
    }
    Ok(v)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let args: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(cli.command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
