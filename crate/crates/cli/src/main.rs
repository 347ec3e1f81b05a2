mod config;
mod grid;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use config::Config;
use grid::parse_grid;
use tpms_core::surface::fundamental_hexagon_at;
use tpms_core::verify::{self, Suite};
use tpms_core::{
    antipodality_test, boundary_curve, branch_values, export_mesh, extend_to_lattice_cell,
    solve_odelta, solve_rho, solve_tstar, BoxReport, Error as CoreError, FamilyParams, MeshFormat,
};

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_TOL: f64 = 1e-12;
const DEFAULT_RESOLUTION: usize = 16;

/// Period problems, special constants and meshes for genus-3 deformations
/// of Schwarz' D surface.
#[derive(Debug, Parser)]
#[command(name = "tpms", version)]
struct Cli {
    /// Flat JSON object with default values for flags (flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the period problem for t (a ≠ b), or fix ρ on the diagonal (a = b, needs --t).
    Solve {
        a: f64,
        b: f64,
        /// Third parameter; only for a = b, where every t solves the period problem.
        #[arg(long)]
        t: Option<f64>,
        /// Absolute tolerance on Q.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Solve over a grid of (a, b) and write CSV rows a,b,t,rho,residual,iterations,status,note.
    Sweep {
        /// start:stop:count or comma-separated values.
        #[arg(long)]
        a_grid: Option<String>,
        #[arg(long)]
        b_grid: Option<String>,
        /// Output CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        /// Worker threads.
        #[arg(long, env = "TPMS_JOBS")]
        jobs: Option<usize>,
    },
    /// Tabulate the curve where the two orthorhombic families meet (t as a function of a = b).
    Boundary {
        #[arg(long)]
        a_grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a*, where the tetragonal families meet.
    Tstar {
        #[arg(long)]
        json: bool,
    },
    /// Branched values of the Gauss map and the antipodality classification.
    Gauss {
        a: f64,
        b: f64,
        t: f64,
        /// López-Ros factor (default: from the period conditions, else 1).
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Mesh the fundamental hexagon (or the 8-copy cell) and write OBJ/PLY.
    Mesh {
        a: f64,
        b: f64,
        /// Omit to solve the period problem for t (a ≠ b).
        t: Option<f64>,
        #[arg(long)]
        rho: Option<f64>,
        /// 1 (hexagon) or 8 (translational cell).
        #[arg(long)]
        copies: Option<usize>,
        /// Bonnet angle.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// obj or ply (default: from the file extension, else obj).
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Run the self-check suites; exits non-zero on any failure.
    Verify {
        /// specfun, periods, derivatives, gauss, surface or all.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::Bracket { .. }) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Solve { a, b, t, tol, json } => {
            let tol = positive(cfg.pick(tol, "tol")?.unwrap_or(DEFAULT_TOL), "--tol")?;
            cmd_solve(
                &mut out,
                a,
                b,
                cfg.pick(t, "t")?,
                tol,
                cfg.switch(json, "json")?,
            )?
        }
        Command::Sweep {
            a_grid,
            b_grid,
            out: path,
            tol,
            jobs,
        } => {
            let a_grid = cfg
                .pick(a_grid, "a_grid")?
                .context("--a-grid is required")?;
            let b_grid = cfg
                .pick(b_grid, "b_grid")?
                .context("--b-grid is required")?;
            let tol = positive(cfg.pick(tol, "tol")?.unwrap_or(DEFAULT_TOL), "--tol")?;
            let jobs = cfg.pick(jobs, "jobs")?;
            cmd_sweep(
                &mut out,
                &parse_grid(&a_grid)?,
                &parse_grid(&b_grid)?,
                cfg.pick(path, "out")?,
                tol,
                jobs,
            )?
        }
        Command::Boundary { a_grid, out: path } => {
            let a_grid = cfg
                .pick(a_grid, "a_grid")?
                .context("--a-grid is required")?;
            cmd_boundary(&mut out, &parse_grid(&a_grid)?, cfg.pick(path, "out")?)?
        }
        Command::Tstar { json } => {
            let a = solve_tstar()?;
            if cfg.switch(json, "json")? {
                print_json(
                    &mut out,
                    &json!({ "schema_version": SCHEMA_VERSION, "a_star": a, "t_star": a * a }),
                )?;
            } else {
                writeln!(out, "{a:?}")?;
            }
        }
        Command::Gauss { a, b, t, rho } => cmd_gauss(&mut out, a, b, t, cfg.pick(rho, "rho")?)?,
        Command::Mesh {
            a,
            b,
            t,
            rho,
            copies,
            theta,
            resolution,
            out: path,
            format,
            json,
        } => {
            let opts = MeshOptions {
                t: cfg.pick(t, "t")?,
                rho: cfg.pick(rho, "rho")?,
                copies: cfg.pick(copies, "copies")?.unwrap_or(1),
                theta: cfg.pick(theta, "theta")?.unwrap_or(0.0),
                resolution: cfg
                    .pick(resolution, "resolution")?
                    .unwrap_or(DEFAULT_RESOLUTION),
                out: cfg.pick(path, "out")?.context("--out is required")?,
                format: cfg.pick(format, "format")?,
                json: cfg.switch(json, "json")?,
            };
            cmd_mesh(&mut out, a, b, opts)?
        }
        Command::Verify { suite, json } => {
            let suite: Suite = cfg
                .pick(suite, "suite")?
                .unwrap_or_else(|| "all".into())
                .parse()?;
            return cmd_verify(&mut out, suite, cfg.switch(json, "json")?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn positive(x: f64, name: &str) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        bail!("{name} must be positive, got {x}");
    }
    Ok(x)
}

fn print_json(out: &mut impl Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct SolveOutput {
    schema_version: u32,
    a: f64,
    b: f64,
    t: f64,
    rho: f64,
    residual_q: f64,
    residual_period: f64,
    iterations: usize,
    canonicalized: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    warnings: Vec<tpms_core::Warning>,
}

fn canonical_note(a: f64, b: f64) -> Option<String> {
    (a > b).then(|| format!("swapped to canonical order a ≤ b: a = {b}, b = {a}"))
}

fn cmd_solve(
    out: &mut impl Write,
    a: f64,
    b: f64,
    t: Option<f64>,
    tol: f64,
    json: bool,
) -> Result<()> {
    let mut notes: Vec<String> = canonical_note(a, b).into_iter().collect();
    let report = if a == b {
        let t = t.context("a = b: every t solves the period problem; pass --t")?;
        let p = FamilyParams::new(a, b, t)?;
        let e = tpms_core::edge_periods(&p)?;
        let rho = solve_rho(&p)?;
        let (r1, r2) = tpms_core::periods::period_residuals(&e, rho);
        notes.push("diagonal: period problem solved by symmetry".into());
        SolveOutput {
            schema_version: SCHEMA_VERSION,
            a: p.a,
            b: p.b,
            t,
            rho,
            residual_q: e.q().abs(),
            residual_period: r1.max(r2),
            iterations: 0,
            canonicalized: false,
            notes,
            warnings: p.warnings(),
        }
    } else {
        if t.is_some() {
            bail!("--t only applies to a = b; for a ≠ b the solver finds t");
        }
        let r = solve_odelta(a.min(b), a.max(b), tol)?;
        SolveOutput {
            schema_version: SCHEMA_VERSION,
            a: r.params.a,
            b: r.params.b,
            t: r.params.t,
            rho: r.params.rho_or_one(),
            residual_q: r.residual_q,
            residual_period: r.residual_period,
            iterations: r.iterations,
            canonicalized: a > b,
            notes,
            warnings: r.warnings,
        }
    };
    for n in &report.notes {
        if n.starts_with("swapped") {
            eprintln!("note: {n}");
        }
    }
    if json {
        print_json(out, &report)?;
    } else {
        writeln!(
            out,
            "a = {:?}\nb = {:?}\nt = {:?}\nrho = {:?}",
            report.a, report.b, report.t, report.rho
        )?;
        writeln!(
            out,
            "|Q| = {:e}\nperiod residual = {:e}",
            report.residual_q, report.residual_period
        )?;
        for w in &report.warnings {
            writeln!(out, "warning: {}", serde_json::to_string(w)?)?;
        }
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SweepRow {
    a: f64,
    b: f64,
    t: Option<f64>,
    rho: Option<f64>,
    residual: Option<f64>,
    iterations: Option<usize>,
    status: &'static str,
    note: String,
}

fn sweep_row(a: f64, b: f64, tol: f64) -> SweepRow {
    let mut row = SweepRow {
        a,
        b,
        t: None,
        rho: None,
        residual: None,
        iterations: None,
        status: "ok",
        note: String::new(),
    };
    if a == b {
        row.status = "skipped";
        row.note = "diagonal".into();
        return row;
    }
    match solve_odelta(a.min(b), a.max(b), tol) {
        Ok(r) => {
            row.t = Some(r.params.t);
            row.rho = Some(r.params.rho_or_one());
            row.residual = Some(r.residual_q);
            row.iterations = Some(r.iterations);
            if a > b {
                row.note = "canonicalized: solved with a and b swapped".into();
            }
        }
        Err(e) => {
            row.status = "error";
            row.note = e.to_string();
        }
    }
    row
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(
            std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        ),
        None => Box::new(std::io::stdout()),
    })
}

fn cmd_sweep(
    out: &mut impl Write,
    a_grid: &[f64],
    b_grid: &[f64],
    path: Option<PathBuf>,
    tol: f64,
    jobs: Option<usize>,
) -> Result<()> {
    let pairs: Vec<(f64, f64)> = a_grid
        .iter()
        .flat_map(|&a| b_grid.iter().map(move |&b| (a, b)))
        .collect();
    // open the output first so an unwritable path fails before any work
    let sink = open_output(path.as_deref())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            bail!("--jobs must be at least 1");
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build()?;
    let rows: Vec<SweepRow> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(a, b)| sweep_row(a, b, tol))
            .collect()
    });
    let mut w = csv::Writer::from_writer(sink);
    for r in &rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.status == "error").count();
    if path.is_some() {
        writeln!(
            out,
            "{} rows ({} solved, {} skipped, {failed} failed)",
            rows.len(),
            rows.iter().filter(|r| r.status == "ok").count(),
            rows.iter().filter(|r| r.status == "skipped").count()
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BoundaryRow {
    a: f64,
    t: Option<f64>,
    residual: Option<f64>,
    dq_db: Option<f64>,
    iterations: Option<usize>,
    status: &'static str,
    note: String,
}

fn cmd_boundary(out: &mut impl Write, a_grid: &[f64], path: Option<PathBuf>) -> Result<()> {
    let mut w = csv::Writer::from_writer(open_output(path.as_deref())?);
    let mut n = 0;
    for &a in a_grid {
        let row = match boundary_curve(a) {
            Ok(p) => BoundaryRow {
                a,
                t: Some(p.t),
                residual: Some(p.residual),
                dq_db: Some(p.dq_db),
                iterations: Some(p.iterations),
                status: "ok",
                note: String::new(),
            },
            Err(e) => BoundaryRow {
                a,
                t: None,
                residual: None,
                dq_db: None,
                iterations: None,
                status: "error",
                note: e.to_string(),
            },
        };
        n += 1;
        w.serialize(row)?;
    }
    w.flush()?;
    if path.is_some() {
        writeln!(out, "{n} rows")?;
    }
    Ok(())
}

/// ρ from the flag, else from the period conditions, else 1.
fn resolve_rho(p: &FamilyParams, rho: Option<f64>, notes: &mut Vec<String>) -> Result<f64> {
    if let Some(r) = rho {
        return Ok(r);
    }
    match solve_rho(p) {
        Ok(r) => {
            notes.push("rho from the period conditions".into());
            Ok(r)
        }
        Err(CoreError::Inconsistent { residual, .. }) => {
            notes.push(format!(
                "period conditions inconsistent (residual {residual:e}); rho = 1"
            ));
            Ok(1.0)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_gauss(out: &mut impl Write, a: f64, b: f64, t: f64, rho: Option<f64>) -> Result<()> {
    let mut notes: Vec<String> = canonical_note(a, b).into_iter().collect();
    let p = FamilyParams::new(a, b, t)?;
    let p = p.with_rho(resolve_rho(&p, rho, &mut notes)?)?;
    let values = branch_values(&p)?;
    let report = antipodality_test(&p)?;
    let points: Vec<_> = values
        .labels
        .iter()
        .zip(values.points)
        .map(|(l, x)| json!({ "label": l, "point": x }))
        .collect();
    let pairs: Vec<_> = report
        .matching
        .iter()
        .map(|&(i, j)| {
            let (p, q) = (values.points[i], values.points[j]);
            let r = ((p[0] + q[0]).powi(2) + (p[1] + q[1]).powi(2) + (p[2] + q[2]).powi(2)).sqrt();
            json!({ "pair": [values.labels[i], values.labels[j]], "residual": r })
        })
        .collect();
    print_json(
        out,
        &json!({
            "schema_version": SCHEMA_VERSION,
            "a": p.a, "b": p.b, "t": p.t, "rho": report.rho_used,
            "classification": report.classification,
            "antipodal": values.antipodal,
            "pair_residual": report.pair_residual,
            "pairs": pairs,
            "points": points,
            "rho4_unit": report.rho4_unit,
            "rho4_t": report.rho4_t,
            "rho4_discrepancy": report.rho4_discrepancy,
            "notes": notes,
        }),
    )
}

struct MeshOptions {
    t: Option<f64>,
    rho: Option<f64>,
    copies: usize,
    theta: f64,
    resolution: usize,
    out: PathBuf,
    format: Option<String>,
    json: bool,
}

fn cmd_mesh(out: &mut impl Write, a: f64, b: f64, o: MeshOptions) -> Result<()> {
    let format = match &o.format {
        Some(f) => f.parse::<MeshFormat>()?,
        None => MeshFormat::from_path(&o.out).unwrap_or(MeshFormat::Obj),
    };
    if o.copies != 1 && o.copies != 8 {
        bail!("--copies must be 1 or 8, got {}", o.copies);
    }
    let mut notes: Vec<String> = canonical_note(a, b).into_iter().collect();
    let params = match o.t {
        Some(t) => {
            let p = FamilyParams::new(a, b, t)?;
            p.with_rho(resolve_rho(&p, o.rho, &mut notes)?)?
        }
        None if a == b => bail!("a = b: pass t explicitly"),
        None => {
            let r = solve_odelta(a.min(b), a.max(b), DEFAULT_TOL)?;
            notes.push(format!(
                "t solved from the period problem (|Q| = {:e})",
                r.residual_q
            ));
            match o.rho {
                Some(rho) => r.params.with_rho(rho)?,
                None => r.params,
            }
        }
    };
    let hex = fundamental_hexagon_at(&params, o.resolution, o.theta, tpms_core::quad::MESH_TOL)?;
    let mut summary = json!({
        "schema_version": SCHEMA_VERSION,
        "a": params.a, "b": params.b, "t": params.t, "rho": params.rho_or_one(),
        "theta": o.theta, "resolution": o.resolution, "copies": o.copies,
        "path": o.out.display().to_string(),
    });
    let mesh = if o.copies == 8 {
        let cell = extend_to_lattice_cell(&hex)?;
        summary["box"] = serde_json::to_value(cell.report)?;
        summary["weld_residual"] = json!(cell.weld_residual);
        summary["euler_characteristic"] = json!(cell.euler_characteristic);
        summary["closed"] = json!(cell.closed);
        cell.mesh
    } else {
        if o.theta == 0.0 {
            summary["box"] = serde_json::to_value(BoxReport::from_mesh(&hex)?)?;
        }
        hex
    };
    export_mesh(&mesh, &o.out, format)?;
    summary["vertices"] = json!(mesh.vertices.len());
    summary["faces"] = json!(mesh.faces.len());
    summary["notes"] = json!(notes);
    if o.json {
        print_json(out, &summary)?;
    } else {
        writeln!(
            out,
            "wrote {} ({} vertices, {} faces)",
            o.out.display(),
            mesh.vertices.len(),
            mesh.faces.len()
        )?;
    }
    Ok(())
}

fn cmd_verify(out: &mut impl Write, suite: Suite, json: bool) -> Result<ExitCode> {
    let reports = verify::run(suite);
    let passed = reports.iter().all(|r| r.passed);
    if json {
        print_json(
            out,
            &json!({ "schema_version": SCHEMA_VERSION, "passed": passed, "suites": reports }),
        )?;
    } else {
        for r in &reports {
            let worst = r.checks.iter().map(|c| c.worst).fold(0.0, f64::max);
            writeln!(
                out,
                "{} {} (worst residual {worst:e})",
                if r.passed { "PASS" } else { "FAIL" },
                serde_json::to_string(&r.suite)?.trim_matches('"')
            )?;
            for c in &r.checks {
                write!(
                    out,
                    "  {} {}: {:e} (tol {:e})",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance
                )?;
                if let Some(e) = &c.error {
                    write!(out, " — {e}")?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
