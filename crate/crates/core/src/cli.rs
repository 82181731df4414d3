//! Command-line front end.
//!
//! Exit codes: `0` ok, `1` runtime failure (domain escape, non-finite
//! distance, I/O), `2` violation found (axioms or contraction), `3` stationary
//! without certificate, `4` no convergence (max iterations or divergence),
//! `64` config error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::axioms::{self, AxiomReport};
use crate::config::ProblemConfig;
use crate::contraction::{verify_contraction, ContractionSpec, ContractionViolation, Mode};
use crate::error::Error;
use crate::map::CoupledMap;
use crate::sampling;
use crate::solver::{self, ConvergenceCertificate, IterationTrace, ProbeReport, SolveConfig, Status};
use crate::space::{Carrier, PartialMetric, PartialMetricSpace, Point};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_STATIONARY: i32 = 3;
pub const EXIT_NO_CONVERGENCE: i32 = 4;
pub const EXIT_CONFIG: i32 = 64;

pub const AXIOM_REPORT: &str = "axiom_report.json";
pub const CONTRACTION_REPORT: &str = "contraction_report.json";
pub const CERTIFICATE: &str = "certificate.json";
pub const TRACE: &str = "trace.json";
pub const PROBE_REPORT: &str = "probe_report.json";
pub const DEMO_REPORT: &str = "demo_report.json";
pub const EFFECTIVE_CONFIG: &str = "effective_config.txt";

#[derive(Debug, Parser)]
#[command(name = "coupled-pm", version, about = "Coupled fixed points on partial metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the partial metric axioms and the induced metric on a sample
    CheckAxioms(CommonArgs),
    /// Check the configured contraction inequality on sampled quadruples
    Verify(CommonArgs),
    /// Run the coupled Picard iteration from `start`
    Solve(CommonArgs),
    /// Solve from every start in `starts` and cluster the results
    Probe(CommonArgs),
    /// Reproduce the (x+y)/6 convergence and the (x+y)/2 non-uniqueness
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = sampling::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Config { .. } => EXIT_CONFIG,
            Error::AxiomViolation { .. } => EXIT_VIOLATION,
            _ => EXIT_RUNTIME,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

pub fn status_exit_code(status: Status) -> i32 {
    match status {
        Status::Converged => EXIT_OK,
        Status::StationaryNoCert => EXIT_STATIONARY,
        Status::MaxIters | Status::Diverging => EXIT_NO_CONVERGENCE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::CheckAxioms(a) => cmd_check_axioms(&load(&a)?, &a.out),
        Command::Verify(a) => cmd_verify(&load(&a)?, &a.out),
        Command::Solve(a) => cmd_solve(&load(&a)?, &a.out),
        Command::Probe(a) => cmd_probe(&load(&a)?, &a.out),
        Command::Demo(a) => {
            let cfg = SolveConfig {
                tol: a.tol,
                max_iters: a.max_iters,
                ..SolveConfig::default()
            };
            cmd_demo(a.seed, &cfg, &a.out)
        }
    }
}

fn load(args: &CommonArgs) -> Result<ProblemConfig, Failure> {
    let mut cfg = ProblemConfig::read(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(tol) = args.tol {
        cfg.tol = tol;
    }
    if let Some(n) = args.max_iters {
        cfg.max_iters = n;
    }
    cfg.check_numerics()?;
    Ok(cfg)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(Error::from)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(Error::from)?;
    Ok(path)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> crate::error::Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_effective_config(cfg: &ProblemConfig, out: &Path) -> Result<(), Failure> {
    fs::create_dir_all(out).map_err(Error::from)?;
    fs::write(out.join(EFFECTIVE_CONFIG), cfg.to_text()).map_err(Error::from)?;
    Ok(())
}

/// Runs all three axiom checks on the configured sample. Tabulated matrices
/// are examined as raw candidates, so a table that is not a partial metric is
/// reported rather than rejected.
pub fn axiom_report(cfg: &ProblemConfig) -> Result<AxiomReport, Failure> {
    let carrier = cfg.carrier()?;
    let report = match carrier {
        Carrier::Tabulated(table) => axioms::check_all(&table, &table.points(), cfg.axiom_tol)?,
        other => {
            let space = crate::space::make_space(other)?;
            let sample = sampling::default_sample(&space, cfg.seed, cfg.sample_points);
            axioms::check_all(&space, &sample, cfg.axiom_tol)?
        }
    };
    Ok(report)
}

pub fn cmd_check_axioms(cfg: &ProblemConfig, out: &Path) -> CmdResult {
    write_effective_config(cfg, out)?;
    let report = axiom_report(cfg)?;
    let path = write_json(out, AXIOM_REPORT, &report)?;
    if report.passed {
        println!("axioms hold on {} sample points; report: {}", report.sample_size, path.display());
        Ok(EXIT_OK)
    } else {
        let v = &report.violations[0];
        let witness: Vec<String> = v.witness.iter().map(Point::to_string).collect();
        println!(
            "{} violation(s); first: {} at ({}) lhs {} rhs {}; report: {}",
            report.violations.len(),
            v.axiom,
            witness.join(", "),
            v.lhs,
            v.rhs,
            path.display()
        );
        Ok(EXIT_VIOLATION)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub spec: ContractionSpec,
    pub delta: f64,
    pub map: String,
    pub quadruples_checked: usize,
    pub tol: f64,
    pub passed: bool,
    pub violations: Vec<ContractionViolation>,
}

fn contraction_report(
    map: &CoupledMap,
    space: &PartialMetricSpace,
    spec: &ContractionSpec,
    seed: u64,
    count: usize,
    tol: f64,
) -> Result<ContractionReport, Failure> {
    let quads = sampling::default_quadruples(space, seed, count);
    let violations = verify_contraction(map, space, spec, &quads, tol)?;
    Ok(ContractionReport {
        spec: *spec,
        delta: spec.delta()?,
        map: map.provenance().to_string(),
        quadruples_checked: quads.len(),
        tol,
        passed: violations.is_empty(),
        violations,
    })
}

pub fn cmd_verify(cfg: &ProblemConfig, out: &Path) -> CmdResult {
    let space = cfg.build_space()?;
    let map = cfg.build_map()?;
    let spec = cfg.spec.ok_or_else(|| Error::Config {
        key: "spec".into(),
        message: "verify needs spec.mode, spec.k and spec.l".into(),
    })?;
    write_effective_config(cfg, out)?;
    let report = contraction_report(&map, &space, &spec, cfg.seed, cfg.quadruples, cfg.axiom_tol)?;
    let path = write_json(out, CONTRACTION_REPORT, &report)?;
    println!(
        "{} on {} quadruples: {} violation(s); report: {}",
        spec.mode,
        report.quadruples_checked,
        report.violations.len(),
        path.display()
    );
    Ok(if report.passed { EXIT_OK } else { EXIT_VIOLATION })
}

pub fn cmd_solve(cfg: &ProblemConfig, out: &Path) -> CmdResult {
    let space = cfg.build_space()?;
    let map = cfg.build_map()?;
    let (x0, y0) = cfg.start_points()?;
    write_effective_config(cfg, out)?;

    let mut warnings = Vec::new();
    if let Some(spec) = &cfg.spec {
        let report = contraction_report(&map, &space, spec, cfg.seed, cfg.quadruples, cfg.axiom_tol)?;
        if !report.passed {
            let msg = format!(
                "contraction check failed on {} of {} sampled quadruples",
                report.violations.len(),
                report.quadruples_checked
            );
            eprintln!("warning: {msg}");
            warnings.push(msg);
        }
    }
    let (mut cert, trace) = solver::solve(&map, &space, x0, y0, cfg.spec.as_ref(), &cfg.solve_config())?;
    cert.notes.splice(0..0, warnings);
    let cert_path = write_json(out, CERTIFICATE, &cert)?;
    write_json(out, TRACE, &trace)?;
    println!("{}; certificate: {}", describe(&cert), cert_path.display());
    Ok(status_exit_code(cert.status))
}

fn describe(cert: &ConvergenceCertificate) -> String {
    let status = serde_json::to_value(cert.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    match cert.fixed_point {
        Some((x, y)) => format!(
            "{status} at ({x}, {y}) after {} iteration(s), residual {:?}",
            cert.iterations, cert.final_residual
        ),
        None => format!("{status} after {} iteration(s), residual {:?}", cert.iterations, cert.final_residual),
    }
}

pub fn cmd_probe(cfg: &ProblemConfig, out: &Path) -> CmdResult {
    let space = cfg.build_space()?;
    let map = cfg.build_map()?;
    let starts = cfg.probe_points()?;
    write_effective_config(cfg, out)?;
    let report = solver::probe_uniqueness(&map, &space, &starts, cfg.spec.as_ref(), &cfg.solve_config())?;
    let path = write_json(out, PROBE_REPORT, &report)?;
    println!(
        "{} start(s), {} distinct coupled fixed point(s); report: {}",
        starts.len(),
        report.distinct_points.len(),
        path.display()
    );
    Ok(report.runs.iter().map(|c| status_exit_code(c.status)).max().unwrap_or(EXIT_OK))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoReport {
    pub seed: u64,
    pub solve_config: SolveConfig,
    /// `(x + y) / 6` from `(1, 2)` under `MIXED_ARG (1/6, 1/6)`.
    pub contraction_check: ContractionReport,
    pub certificate: ConvergenceCertificate,
    pub trace: IterationTrace,
    /// `(x + y) / 2`, which only satisfies the inequality with `k + l = 1`.
    pub boundary_check: ContractionReport,
    pub boundary_probe: ProbeReport,
    pub converged_to_origin: bool,
    pub boundary_not_unique: bool,
}

pub fn demo_report(seed: u64, cfg: &SolveConfig) -> Result<DemoReport, Failure> {
    let space = PartialMetricSpace::max_halfline();
    let sixth = CoupledMap::scaled_sum(6.0);
    let half = CoupledMap::scaled_sum(2.0);
    let spec = ContractionSpec::mixed_equal(1.0 / 3.0)?;
    let r = Point::Real;

    let contraction_check = contraction_report(&sixth, &space, &spec, seed, sampling::DEFAULT_QUADRUPLES, crate::space::AXIOM_TOL)?;
    let (certificate, trace) = solver::solve(&sixth, &space, r(1.0), r(2.0), Some(&spec), cfg)?;
    let converged_to_origin = certificate.status == Status::Converged
        && certificate
            .fixed_point
            .map(|(x, y)| space.induced_metric(x, r(0.0)).unwrap_or(f64::INFINITY) <= cfg.tol
                && space.induced_metric(y, r(0.0)).unwrap_or(f64::INFINITY) <= cfg.tol)
            .unwrap_or(false);

    // Strictly below the boundary the check should fail somewhere.
    let near_boundary = ContractionSpec::new(Mode::MixedArg, 0.4, 0.4);
    let boundary_check =
        contraction_report(&half, &space, &near_boundary, seed, sampling::DEFAULT_QUADRUPLES, crate::space::AXIOM_TOL)?;
    let boundary_probe = solver::probe_uniqueness(&half, &space, &[(r(0.0), r(0.0)), (r(1.0), r(1.0))], None, cfg)?;
    let boundary_not_unique = boundary_probe.distinct_points.len() >= 2;

    Ok(DemoReport {
        seed,
        solve_config: *cfg,
        contraction_check,
        certificate,
        trace,
        boundary_check,
        boundary_probe,
        converged_to_origin,
        boundary_not_unique,
    })
}

pub fn cmd_demo(seed: u64, cfg: &SolveConfig, out: &Path) -> CmdResult {
    let report = demo_report(seed, cfg)?;
    let path = write_json(out, DEMO_REPORT, &report)?;
    let cert = &report.certificate;
    println!("Max partial metric p(x, y) = max{{x, y}} on [0, inf).");
    println!();
    println!("1. F(x, y) = (x + y) / 6 from (1, 2), MIXED_ARG k = l = 1/6 (rate 1/3).");
    println!(
        "   Contraction check: {} violation(s) on {} seeded quadruples.",
        report.contraction_check.violations.len(),
        report.contraction_check.quadruples_checked
    );
    println!(
        "   {}; d0 = {}, a priori bound {} iteration(s).",
        describe(cert),
        cert.d0,
        cert.a_priori_bound_iters.map_or("-".to_string(), |m| m.to_string())
    );
    println!();
    println!("2. F(x, y) = (x + y) / 2, which needs k + l = 1.");
    println!(
        "   With k = l = 0.4 the inequality fails on {} of {} seeded quadruples.",
        report.boundary_check.violations.len(),
        report.boundary_check.quadruples_checked
    );
    let pts: Vec<String> = report
        .boundary_probe
        .distinct_points
        .iter()
        .map(|(x, y)| format!("({x}, {y})"))
        .collect();
    println!("   Coupled fixed points found from (0, 0) and (1, 1): {}", pts.join(", "));
    println!();
    println!("Uniqueness holds under k + l < 1 and is lost at k + l = 1, so the strict bound cannot be relaxed.");
    println!("report: {}", path.display());
    Ok(if report.converged_to_origin && report.boundary_not_unique {
        EXIT_OK
    } else {
        EXIT_NO_CONVERGENCE
    })
}
