// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! Exit codes: `0` success, `1` a check or an integration failed, `2` bad
//! usage or input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quatsym_core::integrator::{convergence_study, integrate, IntegratorConfig, SolverKind};
use quatsym_core::linalg::{make_standard_j, max_abs_diff, symplectic_defect};
use quatsym_core::product::{
    extract_map, graph_residuals, perp_identity_report, projection_residual, LiouvilleFieldSpec,
    QuaternionicTriple,
};
use quatsym_core::sampling::random_vector;
use quatsym_core::systems::{bea_report, HamiltonianSystem};
use quatsym_core::verify::{
    run_all_with, CheckRecord, SuiteConfig, Tolerances, VerificationReport,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::matrix_io::{format_f64, read_matrix_file, write_matrix_file};
use crate::run::{
    format_state, parse_state, to_json, write_output, Envelope, HmatSpec, RunHeader, SystemSpec,
};
use crate::trajectory::{write_comment_header, write_trajectory};

#[derive(Debug, Parser)]
#[command(
    name = "quatsym",
    version,
    about = "Symplectic maps from quaternionic structures, and an implicit symplectic integrator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the randomized verification suites.
    Verify(VerifyArgs),
    /// Build the symplectic map encoded by a pair (R, S).
    Map(MapArgs),
    /// Integrate a system and write the trajectory as CSV.
    Integrate(IntegrateArgs),
    /// Measure the observed order of the integrator.
    Converge(ConvergeArgs),
    /// Report drift of H and of the surrounding Hamiltonian.
    Bea(BeaArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Overrides every upper-bound residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON report destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Negates K before checking the quaternion identities.
    #[arg(long, hide = true)]
    pub corrupt_k: bool,
}

#[derive(Debug, Args)]
pub struct MapArgs {
    #[arg(long)]
    pub r: PathBuf,
    #[arg(long)]
    pub s: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Residual report; defaults to `<out>.json`.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub probes: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    FixedPoint,
    Newton,
}

impl From<Solver> for SolverKind {
    fn from(s: Solver) -> Self {
        match s {
            Solver::FixedPoint => SolverKind::FixedPoint,
            Solver::Newton => SolverKind::Newton,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// oscillator, pendulum, kepler or quadratic:<path>
    #[arg(long)]
    pub system: String,
    /// Degrees of freedom (oscillator only; fixed for the others).
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated initial state of length 2n.
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    /// zero, a matrix file, or random:<frobenius norm>
    #[arg(long, default_value = "zero")]
    pub hmat: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Solver::FixedPoint)]
    pub solver: Solver,
    #[arg(long, default_value_t = quatsym_core::integrator::DEFAULT_SOLVER_TOL)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = quatsym_core::integrator::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.1)]
    pub tau: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.2)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 6)]
    pub levels: usize,
    #[arg(long, default_value_t = 2.0)]
    pub t_final: f64,
    /// `tau,error` CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON destination for the fitted slope and the points.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeaArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 0.01)]
    pub tau: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(Error),
    #[error("{0}")]
    Failed(String),
}

impl CommandError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Failed(_) => 1,
        }
    }
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            Error::Core(core) => Self::Failed(core.to_string()),
            other => Self::Usage(other),
        }
    }
}

impl From<quatsym_core::Error> for CommandError {
    fn from(e: quatsym_core::Error) -> Self {
        Self::Failed(e.to_string())
    }
}

fn usage(context: &str, message: impl Into<String>) -> CommandError {
    CommandError::Usage(Error::input(context, message))
}

fn output_error(e: Error) -> CommandError {
    CommandError::Failed(e.to_string())
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> Result<(), CommandError> {
    match command {
        Command::Verify(a) => cmd_verify(&a),
        Command::Map(a) => cmd_map(&a),
        Command::Integrate(a) => cmd_integrate(&a),
        Command::Converge(a) => cmd_converge(&a),
        Command::Bea(a) => cmd_bea(&a),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub passed: bool,
    pub records: Vec<CheckRecord>,
}

impl From<&VerificationReport> for ReportBody {
    fn from(r: &VerificationReport) -> Self {
        Self {
            passed: r.passed(),
            records: r.records().to_vec(),
        }
    }
}

fn check_tol(name: &str, tol: f64) -> Result<(), CommandError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(usage(name, "must be a positive number"))
    }
}

fn fail_on(report: &VerificationReport) -> Result<(), CommandError> {
    if report.passed() {
        return Ok(());
    }
    let names: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
    Err(CommandError::Failed(format!(
        "failed checks: {}",
        names.join(", ")
    )))
}

fn cmd_verify(a: &VerifyArgs) -> Result<(), CommandError> {
    if a.n == 0 {
        return Err(usage("--n", "must be at least 1"));
    }
    if a.trials == 0 {
        return Err(usage("--trials", "must be at least 1"));
    }
    let mut tolerances = Tolerances::default();
    if let Some(tol) = a.tol {
        check_tol("--tol", tol)?;
        tolerances = tolerances.with_residual_tol(tol);
    }
    let cfg = SuiteConfig {
        tolerances,
        ..SuiteConfig::new(vec![a.n], a.trials, a.seed)
    };
    let report = if a.corrupt_k {
        run_all_with(&cfg, |n| {
            let t = QuaternionicTriple::new(n);
            let k = t.k().scale(-1.0);
            QuaternionicTriple::from_parts(n, t.i().clone(), t.j().clone(), k)
                .expect("dimensions agree")
        })
    } else {
        run_all_with(&cfg, QuaternionicTriple::new)
    };

    let mut header = RunHeader::for_command("verify");
    header.set("n", a.n);
    header.set("trials", a.trials);
    header.set("seed", a.seed);
    header.set(
        "tol",
        a.tol.map_or("default".to_string(), |t| format!("{t:?}")),
    );
    if a.corrupt_k {
        header.set("corrupt_k", true);
    }
    for (k, v) in header.entries() {
        println!("# {k}={v}");
    }
    print!("{report}");
    if let Some(path) = &a.out {
        let doc = Envelope {
            config: header,
            body: ReportBody::from(&report),
        };
        write_output(Some(path), &to_json(&doc)?).map_err(output_error)?;
    }
    fail_on(&report)
}

fn cmd_map(a: &MapArgs) -> Result<(), CommandError> {
    check_tol("--tol", a.tol)?;
    let r = read_matrix_file(&a.r)?;
    let s = read_matrix_file(&a.s)?;
    if r.rows() != s.rows() || r.cols() != s.cols() {
        return Err(usage("--s", "R and S must have the same shape"));
    }
    let map = extract_map(&r, &s)?;
    let spec = LiouvilleFieldSpec::new(&r, &s)?;
    let m = map.matrix();
    let dim = map.dim();

    let mut report = VerificationReport::default();
    let graph = graph_residuals(&map)?;
    report.push(CheckRecord::at_most(
        "extracted map symmetric",
        max_abs_diff(m.as_slice(), m.transpose().as_slice()),
        a.tol,
    ));
    report.push(CheckRecord::at_most(
        "extracted map symplectic",
        symplectic_defect(m, &make_standard_j(dim / 2))?,
        a.tol,
    ));
    report.push(CheckRecord::at_most(
        "graph I-Lagrangian",
        graph.lagrangian_i,
        a.tol,
    ));
    report.push(CheckRecord::at_most(
        "graph J-Lagrangian",
        graph.lagrangian_j,
        a.tol,
    ));
    report.push(CheckRecord::above(
        "graph K-symplectic (min singular value)",
        graph.k_min_singular,
        Tolerances::default().k_min_singular,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut proj, mut stated, mut inverse) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..a.probes {
        let x = random_vector(&mut rng, dim);
        proj = proj.max(projection_residual(&spec, &x, &map.apply(&x))?);
        let perp = perp_identity_report(&r, &s, &x)?;
        stated = stated.max(perp.stated);
        inverse = inverse.max(perp.inverse);
    }
    if a.probes > 0 {
        report.push(CheckRecord::at_most("projection residual", proj, a.tol));
        report.push(CheckRecord::at_most(
            "perp identity with inverse map",
            inverse,
            a.tol,
        ));
        report.push(CheckRecord::info("perp identity as stated", stated));
    }

    write_matrix_file(&a.out, m).map_err(output_error)?;
    let mut header = RunHeader::for_command("map");
    header.set("r", a.r.display());
    header.set("s", a.s.display());
    header.set("out", a.out.display());
    header.set("seed", a.seed);
    header.set("probes", a.probes);
    header.set("tol", format!("{:?}", a.tol));
    let sidecar = a.sidecar.clone().unwrap_or_else(|| {
        let mut p = a.out.clone().into_os_string();
        p.push(".json");
        p.into()
    });
    let doc = Envelope {
        config: header,
        body: ReportBody::from(&report),
    };
    write_output(Some(&sidecar), &to_json(&doc)?).map_err(output_error)?;
    eprint!("{report}");
    fail_on(&report)
}

struct Resolved {
    spec: SystemSpec,
    system: Box<dyn HamiltonianSystem>,
    z0: Vec<f64>,
    cfg: IntegratorConfig,
    header: RunHeader,
}

fn resolve(command: &str, a: &RunArgs, tau: f64, steps: usize) -> Result<Resolved, CommandError> {
    let spec: SystemSpec = a.system.parse().map_err(CommandError::Usage)?;
    let system = spec.build(a.n).map_err(CommandError::Usage)?;
    let dim = 2 * system.n();
    let z0 = match &a.z0 {
        Some(text) => parse_state(text, dim).map_err(CommandError::Usage)?,
        None => spec.default_state(dim),
    };
    let hmat_spec: HmatSpec = a.hmat.parse().map_err(CommandError::Usage)?;
    let hmat = hmat_spec
        .resolve(dim, a.seed)
        .map_err(CommandError::Usage)?;
    check_tol("--solver-tol", a.solver_tol)?;
    if a.max_iter == 0 {
        return Err(usage("--max-iter", "must be at least 1"));
    }
    if !(tau.is_finite() && tau > 0.0) {
        return Err(usage("--tau", "must be a positive number"));
    }
    let hmat_norm = hmat.as_ref().map_or(0.0, |h| h.frobenius());
    let cfg = IntegratorConfig::new(tau, steps)
        .with_hmat(hmat)
        .with_solver(a.solver.into())
        .with_tolerance(a.solver_tol)
        .with_max_iter(a.max_iter);
    cfg.validate(dim)
        .map_err(|e| usage("--hmat", e.to_string()))?;

    let mut header = RunHeader::for_command(command);
    header.set("system", &spec);
    header.set("n", system.n());
    header.set("z0", format_state(&z0));
    header.set("hmat", &hmat_spec);
    header.set("hmat_norm", format_f64(hmat_norm));
    header.set("seed", a.seed);
    header.set(
        "solver",
        a.solver
            .to_possible_value()
            .expect("no skipped variants")
            .get_name(),
    );
    header.set("solver_tol", format!("{:?}", a.solver_tol));
    header.set("max_iter", a.max_iter);
    Ok(Resolved {
        spec,
        system,
        z0,
        cfg,
        header,
    })
}

fn cmd_integrate(a: &IntegrateArgs) -> Result<(), CommandError> {
    let mut r = resolve("integrate", &a.run, a.tau, a.steps)?;
    r.header.set("tau", format!("{:?}", a.tau));
    r.header.set("steps", a.steps);
    let traj = integrate(r.system.as_ref(), &r.cfg, &r.z0)
        .map_err(|e| CommandError::Failed(format!("{}: {e}", r.spec)))?;
    let mut bytes = Vec::new();
    write_trajectory(&mut bytes, &r.header, &traj).map_err(output_error)?;
    write_output(a.out.as_deref(), &bytes).map_err(output_error)
}

/// JSON body written by `converge`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeBody {
    pub slope: f64,
    pub exact_reference: bool,
    pub points: Vec<quatsym_core::integrator::ConvergencePoint>,
}

fn cmd_converge(a: &ConvergeArgs) -> Result<(), CommandError> {
    if a.levels == 0 {
        return Err(usage("--levels", "must be at least 1"));
    }
    if !(a.t_final.is_finite() && a.t_final > 0.0) {
        return Err(usage("--t-final", "must be a positive number"));
    }
    let mut r = resolve("converge", &a.run, a.tau_max, 1)?;
    r.header.set("tau_max", format!("{:?}", a.tau_max));
    r.header.set("levels", a.levels);
    r.header.set("t_final", format!("{:?}", a.t_final));
    let study =
        convergence_study(r.system.as_ref(), &r.cfg, &r.z0, a.t_final, a.levels).map_err(|e| {
            match e.root() {
                quatsym_core::Error::InvalidArgument(_) => usage("--t-final", e.to_string()),
                _ => CommandError::Failed(format!("{}: {e}", r.spec)),
            }
        })?;

    let mut csv_bytes = Vec::new();
    write_comment_header(&mut csv_bytes, &r.header)
        .map_err(|e| output_error(Error::Csv(e.into())))?;
    {
        let mut w = csv::Writer::from_writer(&mut csv_bytes);
        let res: csv::Result<()> = (|| {
            w.write_record(["tau", "error"])?;
            for p in &study.points {
                w.write_record([format_f64(p.tau), format_f64(p.error)])?;
            }
            w.flush()?;
            Ok(())
        })();
        res.map_err(|e| output_error(e.into()))?;
    }
    write_output(a.out.as_deref(), &csv_bytes).map_err(output_error)?;
    eprintln!("slope={}", study.slope);
    if let Some(path) = &a.json {
        let doc = Envelope {
            config: r.header,
            body: ConvergeBody {
                slope: study.slope,
                exact_reference: study.exact_reference,
                points: study.points,
            },
        };
        write_output(Some(path), &to_json(&doc)?).map_err(output_error)?;
    }
    if study.slope.is_finite() {
        Ok(())
    } else {
        Err(CommandError::Failed("slope could not be fitted".into()))
    }
}

fn cmd_bea(a: &BeaArgs) -> Result<(), CommandError> {
    let mut r = resolve("bea", &a.run, a.tau, a.steps)?;
    r.header.set("tau", format!("{:?}", a.tau));
    r.header.set("steps", a.steps);
    let report = bea_report(r.system.as_ref(), &r.cfg, &r.z0)
        .map_err(|e| CommandError::Failed(format!("{}: {e}", r.spec)))?;
    let doc = Envelope {
        config: r.header,
        body: report,
    };
    write_output(a.out.as_deref(), &to_json(&doc)?).map_err(output_error)
}
