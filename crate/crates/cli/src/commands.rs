use std::fmt;

use quadscribe_core::flow::{flow_closed_form, flow_ode, hamiltonian};
use quadscribe_core::inscribe::oracle::ORACLE_MIN_GRID;
use quadscribe_core::inscribe::{find_inscriptions, rectangle_search_sphere_with, SearchOutcome};
use quadscribe_core::io::chart::to_model;
use quadscribe_core::io::record::OracleMinimumRecord;
use quadscribe_core::io::{load_curve, write_svg, Chart, InscriptionRecord, OracleSummary, Provenance, ResultRecord};
use quadscribe_core::pullback::{compute_constants, verify_pullback_geometric_seeded};
use quadscribe_core::{
    brute_force_oracle, solver_agrees_with_oracle, AngleTriple, Error, PairMap, PairState, Surface, SurfacePoint, Vec3,
};

use crate::{Command, FlowArgs, FlowSurface, InscribeArgs, PullbackArgs, RenderArgs, VerifyCommand};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or malformed input files.
    Usage(String),
    /// A check failed, a hypothesis does not hold, or nothing was found.
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Spec(_)
            | Error::Record(_)
            | Error::Io(_)
            | Error::InvalidAngle { .. }
            | Error::InvalidTriple { .. }
            | Error::NotOnSurface { .. }
            | Error::InvalidCurve(_)
            | Error::SurfaceMismatch(..)
            | Error::UnsupportedSurface(_)
            | Error::GridTooSmall { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

type Outcome = Result<(), CliError>;

pub fn run(command: Command, args: Vec<String>) -> Outcome {
    match command {
        Command::Verify {
            what: VerifyCommand::Pullback(a),
        } => verify_pullback(a),
        Command::Inscribe(a) => inscribe(a, args),
        Command::Flow(a) => flow(a),
        Command::Render(a) => render(a),
    }
}

fn verify_pullback(a: PullbackArgs) -> Outcome {
    let triple = AngleTriple::new(a.theta, a.phi1, a.phi2)?;
    let constants = compute_constants(&triple)?;
    println!("a        = {:.15}", constants.a);
    println!("b        = {:.15}", constants.b);
    println!("c        = {:.15}", constants.c);
    println!("residual = {:.3e}", constants.residual);
    let report = verify_pullback_geometric_seeded(&triple, a.trials, a.seed)?;
    println!(
        "geometric: {} trials, max relative error {:.3e} (threshold {:.0e}), {} failures",
        report.trials,
        report.max_rel_error,
        report.threshold,
        report.failures.len()
    );
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Failed(
            "geometric pullback check exceeded its tolerance".into(),
        ))
    }
}

fn inscribe(a: InscribeArgs, args: Vec<String>) -> Outcome {
    let (spec, sc) = load_curve(&a.curve).map_err(|e| CliError::Usage(format!("{}: {e}", a.curve.display())))?;
    let surface = sc.surface();
    let rectangle = a.phi1.is_none();
    let map = if a.flow || (rectangle && surface == Surface::Spherical) {
        PairMap::rectangle_flow(a.theta)?
    } else {
        let triple = match (a.phi1, a.phi2) {
            (Some(p1), Some(p2)) => AngleTriple::new(a.theta, p1, p2)?,
            _ => AngleTriple::rectangle(a.theta)?,
        };
        PairMap::Cyclic(triple)
    };
    if surface == Surface::Spherical && !(sc.diameter() < std::f64::consts::PI) && matches!(map, PairMap::Cyclic(_)) {
        eprintln!("warning: curve diameter {:.6} is not below pi", sc.diameter());
    }
    let SearchOutcome { inscriptions, stats } = match map {
        PairMap::RectangleFlow(theta) if surface == Surface::Spherical => {
            rectangle_search_sphere_with(&sc, theta, a.grid)?
        }
        _ => find_inscriptions(&sc, &map, a.grid)?,
    };

    let mut record = ResultRecord::new(surface, spec.chart, Provenance::current(args));
    record.inscriptions = inscriptions
        .iter()
        .map(|ins| InscriptionRecord::new(ins, &sc, spec.chart))
        .collect();
    record.diagnostics.search = Some(stats);

    let t = map.triple();
    println!(
        "{} curve, {} samples, type ({:.6}, {:.6}, {:.6}){}",
        surface.name(),
        sc.len(),
        t.theta(),
        t.phi1(),
        t.phi2(),
        if matches!(map, PairMap::RectangleFlow(_)) {
            " via the rectangle flow"
        } else {
            ""
        }
    );
    println!(
        "grid {}: {} seeds, {} converged, {} validated",
        stats.grid,
        stats.candidates,
        stats.converged,
        inscriptions.len()
    );
    for (i, r) in record.inscriptions.iter().enumerate() {
        let p = r.params;
        println!(
            "  #{i}: params ({:.6}, {:.6}, {:.6}, {:.6}) radius {:.6} residual {:.2e}",
            p[0], p[1], p[2], p[3], r.radius, r.residual
        );
    }

    let mut oracle_ok = true;
    if a.oracle {
        let n = a.oracle_grid.max(ORACLE_MIN_GRID);
        let minima = brute_force_oracle(&sc, &map, n)?;
        let tolerance = 2.0 / n as f64;
        oracle_ok = solver_agrees_with_oracle(&inscriptions, &minima, tolerance);
        println!(
            "oracle grid {n}: {} minima, {}",
            minima.len(),
            if oracle_ok {
                "agrees with the solver"
            } else {
                "DISAGREES with the solver"
            }
        );
        record.diagnostics.oracle = Some(OracleSummary {
            grid: n,
            minima: minima.into_iter().map(OracleMinimumRecord::from).collect(),
            agrees: oracle_ok,
            tolerance,
        });
    }

    if let Some(out) = &a.out {
        std::fs::write(out, record.to_json()).map_err(|e| CliError::Usage(format!("{}: {e}", out.display())))?;
    }
    if let Some(svg) = &a.svg {
        write_svg(svg, &sc, spec.chart, Some(&record))
            .map_err(|e| CliError::Usage(format!("{}: {e}", svg.display())))?;
    }
    if record.inscriptions.is_empty() {
        return Err(CliError::Failed("no validated inscription found".into()));
    }
    if !oracle_ok {
        return Err(CliError::Failed("solver and oracle disagree".into()));
    }
    Ok(())
}

fn flow(a: FlowArgs) -> Outcome {
    let surface = match a.surface {
        FlowSurface::Sphere => Surface::Spherical,
        FlowSurface::Hyperbolic => Surface::Hyperbolic,
    };
    let chart: Chart = a.chart.into();
    let point = |c: &[f64]| -> Result<SurfacePoint, CliError> {
        if chart == Chart::EmbeddedR3 {
            let [x, y, z] = <[f64; 3]>::try_from(c)
                .map_err(|_| CliError::Usage(format!("expected 3 coordinates, got {}", c.len())))?;
            return Ok(SurfacePoint::new(surface, Vec3::new(x, y, z))?);
        }
        Ok(SurfacePoint::new(surface, to_model(surface, chart, c)?)?)
    };
    let state = PairState::new(point(&a.p)?, point(&a.q)?)?;
    let end = flow_closed_form(&state, a.theta)?;
    let h0 = hamiltonian(&state)?;
    let fmt = |p: &SurfacePoint| {
        let c = p.coords();
        format!("({:.12}, {:.12}, {:.12})", c.x, c.y, c.z)
    };
    println!("closed form: p = {}  q = {}", fmt(end.p()), fmt(end.q()));
    println!("H = {h0:.15}, distance {:.15}", state.distance());
    let mut drift = (hamiltonian(&end)? - h0).abs();
    let mut ok = drift < a.tolerance;
    if a.ode {
        if !(a.step > 0.0) || !a.step.is_finite() {
            return Err(CliError::Usage(format!("step must be positive, got {}", a.step)));
        }
        let ode = flow_ode(&state, a.theta, a.step)?;
        let gap = surface
            .dist(ode.p().coords(), end.p().coords())
            .max(surface.dist(ode.q().coords(), end.q().coords()));
        drift = drift.max((hamiltonian(&ode)? - h0).abs());
        println!("ode (step {}): p = {}  q = {}", a.step, fmt(ode.p()), fmt(ode.q()));
        println!("closed-form discrepancy {gap:.3e}");
        ok &= gap < a.tolerance;
    }
    println!("H drift {drift:.3e}");
    ok &= drift < a.tolerance;
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "flow checks exceeded tolerance {:.0e}",
            a.tolerance
        )))
    }
}

fn render(a: RenderArgs) -> Outcome {
    let (spec, sc) = load_curve(&a.curve).map_err(|e| CliError::Usage(format!("{}: {e}", a.curve.display())))?;
    let chart = a.chart.map(Chart::from).unwrap_or(spec.chart);
    if !chart.supports(sc.surface()) {
        return Err(CliError::Usage(format!(
            "chart {} does not apply to the {} surface",
            chart.name(),
            sc.surface().name()
        )));
    }
    let record = match &a.results {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            let record = ResultRecord::from_json(&text)?;
            if record.surface != sc.surface() {
                return Err(CliError::Usage(format!(
                    "results are for the {} surface, the curve is {}",
                    record.surface.name(),
                    sc.surface().name()
                )));
            }
            Some(record)
        }
        None => None,
    };
    write_svg(&a.out, &sc, chart, record.as_ref()).map_err(|e| CliError::Usage(format!("{}: {e}", a.out.display())))?;
    println!(
        "wrote {} ({} inscriptions)",
        a.out.display(),
        record.map_or(0, |r| r.inscriptions.len())
    );
    Ok(())
}
