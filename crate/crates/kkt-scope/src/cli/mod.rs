//! Command-line front end: problem-file ingestion, subcommand dispatch,
//! deterministic reports on stdout, and CSV emission via `--out`.
//!
//! Exit codes: 0 success, 1 usage, 2 file/schema/expression errors,
//! 3 numeric failures (domain errors, zero gradients), 4 premise violations
//! or warnings under `--strict`. Every failure prints a single-line
//! `ERROR <code>: <message>` diagnostic to stderr first.
//!
//! Identical inputs produce byte-identical outputs: floats print with 17
//! significant digits, orderings are fixed, and the `KKT_SCOPE_THREADS`
//! environment variable caps internal parallelism without affecting output
//! bytes.

mod file;

pub use file::{load_problem, FileOptions, LoadedKind, LoadedProblem};

use crate::kkt::{self, KktError};
use crate::oracle::{self, OracleConfig};
use crate::scalarize::{self, ScalarizationProblem, ScalarizeError, WeightVector};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Once;
use thiserror::Error;

/// Errors surfaced to the user, each mapped to a stable exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("schema error{}: {message}", fmt_path(.path))]
    Schema { path: String, message: String },
    #[error("expression error at {path}: {message}")]
    Expression { path: String, offset: usize, message: String },
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Premise(String),
    #[error("{0} warning(s) treated as errors (--strict)")]
    StrictWarnings(usize),
}

fn fmt_path(path: &str) -> String {
    if path.is_empty() {
        String::new()
    } else {
        format!(" at {path}")
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Schema { .. } | CliError::Expression { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Premise(_) | CliError::StrictWarnings(_) => 4,
        }
    }
}

impl From<KktError> for CliError {
    fn from(e: KktError) -> Self {
        match e {
            KktError::InvalidTolerance
            | KktError::InvalidGrid
            | KktError::PlotDimension(_)
            | KktError::ObjectiveIndex { .. }
            | KktError::Dimension { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<ScalarizeError> for CliError {
    fn from(e: ScalarizeError) -> Self {
        match e {
            ScalarizeError::InvalidGrid
            | ScalarizeError::InvalidTrials
            | ScalarizeError::WeightDimension { .. }
            | ScalarizeError::PointDimension { .. } => CliError::Usage(e.to_string()),
            ScalarizeError::PremiseViolation { .. } => CliError::Premise(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<oracle::OracleError> for CliError {
    fn from(e: oracle::OracleError) -> Self {
        match e {
            oracle::OracleError::Eval { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// 17 significant digits; round-trips every finite `f64` and keeps golden
/// outputs byte-stable.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn fmt_coords(names: &[String], values: &[f64]) -> String {
    let mut out = String::new();
    for (i, (name, value)) in names.iter().zip(values).enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{name} = {}", fmt_f64(*value));
    }
    out
}

fn fmt_beta(beta: &WeightVector) -> String {
    let mut out = String::new();
    for (i, value) in beta.head().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "beta_{} = {}", i + 1, fmt_f64(*value));
    }
    out
}

#[derive(Parser, Debug)]
#[command(
    name = "kkt-scope",
    version,
    about = "Multiplier sign analysis and weighted-sum scalarization for box-domained programs"
)]
struct Cli {
    /// Treat warnings as errors (exit code 4).
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a problem file and report its shape.
    Validate { file: PathBuf },
    /// Multiplier and cone analysis of a kkt problem.
    #[command(subcommand)]
    Kkt(KktCommand),
    /// Weighted-sum scalarization of a multi-objective problem.
    #[command(subcommand)]
    Scalarize(ScalarizeCommand),
    /// Brute-force reference oracles (debugging aid).
    #[command(subcommand, hide = true)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
enum KktCommand {
    /// Estimate multipliers, classify signs, and decide cone membership.
    Analyze {
        file: PathBuf,
        /// Query point, comma separated; overrides the file's `point`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
        /// Activity/cone tolerance (default 1e-6).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Emit planar cone-plot data as CSV (2-variable problems).
    Plot {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
        /// Samples per axis (default 50).
        #[arg(long)]
        grid: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum ScalarizeCommand {
    /// Sample the value function E*(beta) over the weight simplex.
    Curve {
        file: PathBuf,
        #[arg(long)]
        beta_grid: Option<usize>,
        #[arg(long)]
        inner_grid: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize E*(beta) over the weight simplex.
    Maximize {
        file: PathBuf,
        #[arg(long)]
        beta_grid: Option<usize>,
        #[arg(long)]
        inner_grid: Option<usize>,
    },
    /// Probe the curvature of E*(beta) in both inequality directions.
    Curvature {
        file: PathBuf,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Optional CSV of per-trial slacks.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the degenerate single-objective limit.
    Degenerate { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Brute-force grid minimization of one objective.
    Min {
        file: PathBuf,
        /// 1-based objective index.
        #[arg(long, default_value_t = 1)]
        objective: usize,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Dense max-min scan over weights and resources.
    Saddle {
        file: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Central-difference gradient of one objective at a point.
    Grad {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        objective: usize,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-5)]
        step: f64,
    },
    /// Lattice feasibility scan for the multiplier cone at a point.
    Cone {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10.0)]
        mu_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Applies `KKT_SCOPE_THREADS` to the global worker pool once per process.
/// Results never depend on the thread count, only wall time does.
fn init_thread_pool() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        if let Ok(raw) = std::env::var("KKT_SCOPE_THREADS") {
            if let Ok(n) = raw.parse::<usize>() {
                if n > 0 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}

/// Parses `argv` and runs one command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_thread_pool();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == ErrorKind::DisplayHelp
                || e.kind() == ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            eprintln!("ERROR 1: {first}");
            for line in message.lines().skip(1) {
                eprintln!("{line}");
            }
            return 1;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            let code = err.exit_code();
            let message = err.to_string().replace('\n', " ");
            eprintln!("ERROR {code}: {message}");
            code
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { file } => cmd_validate(&file, cli.strict),
        Command::Kkt(command) => match command {
            KktCommand::Analyze { file, point, tol } => {
                cmd_kkt_analyze(&file, point, tol, cli.strict)
            }
            KktCommand::Plot { file, point, grid, out } => {
                cmd_kkt_plot(&file, point, grid, &out, cli.strict)
            }
        },
        Command::Scalarize(command) => match command {
            ScalarizeCommand::Curve { file, beta_grid, inner_grid, out } => {
                cmd_scalarize_curve(&file, beta_grid, inner_grid, &out)
            }
            ScalarizeCommand::Maximize { file, beta_grid, inner_grid } => {
                cmd_scalarize_maximize(&file, beta_grid, inner_grid)
            }
            ScalarizeCommand::Curvature { file, trials, seed, out } => {
                cmd_scalarize_curvature(&file, trials, seed, out.as_deref())
            }
            ScalarizeCommand::Degenerate { file } => cmd_scalarize_degenerate(&file, cli.strict),
        },
        Command::Oracle(command) => match command {
            OracleCommand::Min { file, objective, grid } => cmd_oracle_min(&file, objective, grid),
            OracleCommand::Saddle { file, grid } => cmd_oracle_saddle(&file, grid),
            OracleCommand::Grad { file, objective, point, step } => {
                cmd_oracle_grad(&file, objective, point, step)
            }
            OracleCommand::Cone { file, point, mu_max, step, tol } => {
                cmd_oracle_cone(&file, point, mu_max, step, tol)
            }
        },
    }
}

const DEFAULT_TOL: f64 = 1e-6;
const DEFAULT_PLOT_GRID: usize = 50;
const DEFAULT_INNER_GRID: usize = 1024;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_SEED: u64 = 0;

fn default_beta_grid(objectives: usize) -> usize {
    match objectives {
        2 => 64,
        3 => 32,
        _ => 8,
    }
}

fn expect_kkt(loaded: LoadedProblem) -> Result<(kkt::Problem, FileOptions), CliError> {
    match loaded.kind {
        LoadedKind::Kkt(problem) => Ok((problem, loaded.options)),
        LoadedKind::Scalarize(_) => Err(CliError::Usage(
            "this command needs a kkt problem file (kind = \"kkt\")".into(),
        )),
    }
}

fn expect_scalarize(
    loaded: LoadedProblem,
) -> Result<(ScalarizationProblem, FileOptions), CliError> {
    match loaded.kind {
        LoadedKind::Scalarize(problem) => Ok((problem, loaded.options)),
        LoadedKind::Kkt(_) => Err(CliError::Usage(
            "this command needs a scalarize problem file (kind = \"scalarize\")".into(),
        )),
    }
}

fn resolve_point(
    flag: Option<Vec<f64>>,
    options: &FileOptions,
) -> Result<Vec<f64>, CliError> {
    flag.or_else(|| options.point.clone()).ok_or_else(|| {
        CliError::Usage("a query point is required (--point or `point` in the file)".into())
    })
}

fn emit_warnings(warnings: &[String], strict: bool) -> Result<(), CliError> {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if strict && !warnings.is_empty() {
        return Err(CliError::StrictWarnings(warnings.len()));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn cmd_validate(path: &Path, strict: bool) -> Result<(), CliError> {
    let loaded = load_problem(path)?;
    match &loaded.kind {
        LoadedKind::Kkt(problem) => {
            emit_warnings(&problem.warnings(), strict)?;
            println!("ok: kkt problem");
            println!("case: {}", kkt::classify_case(problem));
            println!("variables: {}", problem.variables().join(", "));
            println!("objectives: {}", problem.objectives().len());
            println!("constraints: {}", problem.constraints().len());
        }
        LoadedKind::Scalarize(problem) => {
            let seed = loaded.options.seed.unwrap_or(DEFAULT_SEED);
            emit_warnings(&problem.positivity_warnings(seed, 1000), strict)?;
            println!("ok: scalarize problem");
            println!("variables: {}", problem.variables().join(", "));
            println!("objectives: {}", problem.objectives().len());
        }
    }
    Ok(())
}

fn cmd_kkt_analyze(
    path: &Path,
    point: Option<Vec<f64>>,
    tol: Option<f64>,
    strict: bool,
) -> Result<(), CliError> {
    let (problem, options) = expect_kkt(load_problem(path)?)?;
    emit_warnings(&problem.warnings(), strict)?;
    let point = resolve_point(point, &options)?;
    let tol = tol.or(options.tol).unwrap_or(DEFAULT_TOL);
    let analysis = kkt::analyze(&problem, &point, tol)?;

    println!("case: {}", analysis.case);
    println!("point: {}", fmt_coords(problem.variables(), &point));
    println!("tol: {}", fmt_f64(tol));
    if analysis.active.is_empty() {
        println!("active: none");
    } else {
        let labels: Vec<String> =
            analysis.active.iter().map(|y| format!("C{}", y + 1)).collect();
        println!("active: {}", labels.join(", "));
    }
    for report in &analysis.objectives {
        println!("objective O{}:", report.objective + 1);
        for m in &report.estimate.multipliers {
            println!(
                "  mu_{} = {} [{}] ({})",
                m.constraint + 1,
                fmt_f64(m.value),
                m.sign,
                if m.active { "active" } else { "inactive" }
            );
        }
        println!("  residual = {}", fmt_f64(report.estimate.residual));
        println!("  cone: {}", report.cone.verdict);
        if !report.sign_table.is_empty() {
            println!("  table:");
            for row in &report.sign_table {
                println!(
                    "    C{}: grad_O = {}, grad_C = {}, case {} -> {}",
                    row.constraint + 1,
                    row.grad_o,
                    row.grad_c,
                    row.case,
                    match row.sign {
                        kkt::SignClass::Positive => "mu > 0",
                        kkt::SignClass::ForcedZero => "mu = 0",
                    }
                );
            }
        }
    }
    Ok(())
}

fn plot_csv(dataset: &kkt::PlotDataset) -> String {
    let mut out = String::from("kind,x1,x2,dx1,dx2,label\n");
    for row in &dataset.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            row.kind.as_str(),
            fmt_f64(row.x1),
            fmt_f64(row.x2),
            fmt_f64(row.dx1),
            fmt_f64(row.dx2),
            row.label
        );
    }
    out
}

fn cmd_kkt_plot(
    path: &Path,
    point: Option<Vec<f64>>,
    grid: Option<usize>,
    out: &Path,
    strict: bool,
) -> Result<(), CliError> {
    let (problem, options) = expect_kkt(load_problem(path)?)?;
    emit_warnings(&problem.warnings(), strict)?;
    let point = resolve_point(point, &options)?;
    let grid = grid.or(options.grid).unwrap_or(DEFAULT_PLOT_GRID);
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let dataset = kkt::emit_cone_plot_data(&problem, &point, grid, tol)?;
    write_file(out, &plot_csv(&dataset))?;
    println!("rows: {}", dataset.rows.len());
    for (x, verdict) in dataset.verdicts.iter().enumerate() {
        println!("cone O{}: {verdict}", x + 1);
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn curve_csv(problem: &ScalarizationProblem, curve: &scalarize::EStarCurve) -> String {
    let mut header: Vec<String> = (1..problem.objectives().len())
        .map(|x| format!("beta_{x}"))
        .collect();
    for i in 1..=problem.variables().len() {
        header.push(format!("r_{i}"));
    }
    header.push("e_star".into());
    header.push("residual".into());
    let mut out = header.join(",");
    out.push('\n');
    for sample in &curve.samples {
        let mut cells: Vec<String> = sample.beta.head().iter().map(|b| fmt_f64(*b)).collect();
        cells.extend(sample.r_star.iter().map(|r| fmt_f64(*r)));
        cells.push(fmt_f64(sample.e_star));
        cells.push(fmt_f64(sample.inner_residual));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn cmd_scalarize_curve(
    path: &Path,
    beta_grid: Option<usize>,
    inner_grid: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let (problem, options) = expect_scalarize(load_problem(path)?)?;
    let beta_grid = beta_grid
        .or(options.beta_grid)
        .unwrap_or_else(|| default_beta_grid(problem.objectives().len()));
    let inner_grid = inner_grid.or(options.inner_grid).unwrap_or(DEFAULT_INNER_GRID);
    let curve = scalarize::sample_estar_curve(&problem, beta_grid, inner_grid)?;
    write_file(out, &curve_csv(&problem, &curve))?;

    let best = curve
        .samples
        .iter()
        .reduce(|best, s| if s.e_star > best.e_star { s } else { best })
        .expect("curve is never empty");
    println!("samples: {}", curve.samples.len());
    println!("max e_star = {} at {}", fmt_f64(best.e_star), fmt_beta(&best.beta));
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_scalarize_maximize(
    path: &Path,
    beta_grid: Option<usize>,
    inner_grid: Option<usize>,
) -> Result<(), CliError> {
    let (problem, options) = expect_scalarize(load_problem(path)?)?;
    let beta_grid = beta_grid
        .or(options.beta_grid)
        .unwrap_or_else(|| default_beta_grid(problem.objectives().len()));
    let inner_grid = inner_grid.or(options.inner_grid).unwrap_or(DEFAULT_INNER_GRID);
    let (beta, sample) = scalarize::outer_maximize_beta(&problem, beta_grid, inner_grid)?;
    println!("beta_star: {}", fmt_beta(&beta));
    println!("e_star = {}", fmt_f64(sample.e_star));
    println!("r_star: {}", fmt_coords(problem.variables(), &sample.r_star));
    println!("inner_residual = {}", fmt_f64(sample.inner_residual));
    Ok(())
}

fn curvature_csv(probe: &scalarize::CurvatureProbe) -> String {
    let mut out = String::from("alpha,slack_paper,slack_reverse\n");
    for t in &probe.trials {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(t.alpha),
            fmt_f64(t.slack_paper),
            fmt_f64(t.slack_reverse)
        );
    }
    out
}

fn cmd_scalarize_curvature(
    path: &Path,
    trials: Option<usize>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let (problem, options) = expect_scalarize(load_problem(path)?)?;
    let trials = trials.or(options.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = seed.or(options.seed).unwrap_or(DEFAULT_SEED);
    let inner_grid = options.inner_grid.unwrap_or(DEFAULT_INNER_GRID);
    let probe = scalarize::check_estar_curvature(&problem, trials, seed, inner_grid)?;

    let counts = probe.sign_counts();
    println!("trials: {}", probe.trials.len());
    println!("seed: {seed}");
    println!(
        "convex direction (slack_paper >= -1e-9): {}/{}",
        probe.convex_direction_holds(),
        probe.trials.len()
    );
    println!(
        "concave direction (slack_reverse >= -1e-9): {}/{}",
        probe.concave_direction_holds(),
        probe.trials.len()
    );
    println!(
        "slack_paper signs: positive {}, zero {}, negative {}",
        counts.positive, counts.zero, counts.negative
    );
    if let Some(out) = out {
        write_file(out, &curvature_csv(&probe))?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_scalarize_degenerate(path: &Path, strict: bool) -> Result<(), CliError> {
    let (problem, options) = expect_scalarize(load_problem(path)?)?;
    let beta_grid = options
        .beta_grid
        .unwrap_or_else(|| default_beta_grid(problem.objectives().len()));
    let inner_grid = options.inner_grid.unwrap_or(DEFAULT_INNER_GRID);
    let seed = options.seed.unwrap_or(DEFAULT_SEED);
    let report =
        scalarize::degenerate_single_objective(&problem, beta_grid, inner_grid, seed)?;
    println!("e_star_at_one = {}", fmt_f64(report.e_star_at_one));
    println!(
        "r_star_at_one: {}",
        fmt_coords(problem.variables(), &report.r_star_at_one)
    );
    println!("r_star_independent: {}", report.r_star_independent);
    println!("max_ratio_deviation = {}", fmt_f64(report.max_ratio_deviation));
    println!("max_r_star_deviation = {}", fmt_f64(report.max_r_star_deviation));
    for w in &report.warnings {
        println!("warning: {w}");
    }
    if strict && !report.warnings.is_empty() {
        return Err(CliError::StrictWarnings(report.warnings.len()));
    }
    Ok(())
}

fn cmd_oracle_min(path: &Path, objective: usize, grid: Option<usize>) -> Result<(), CliError> {
    let loaded = load_problem(path)?;
    let (objectives, variables, domain) = match &loaded.kind {
        LoadedKind::Kkt(p) => (p.objectives(), p.variables(), p.domain()),
        LoadedKind::Scalarize(p) => (p.objectives(), p.variables(), p.domain()),
    };
    if objective == 0 || objective > objectives.len() {
        return Err(CliError::Usage(format!(
            "--objective {objective} out of range (problem has {})",
            objectives.len()
        )));
    }
    let config = OracleConfig {
        grid_points: grid.or(loaded.options.grid).unwrap_or(1001),
        ..OracleConfig::default()
    };
    let (argmin, value) =
        oracle::brute_force_min(&objectives[objective - 1], variables, domain, &config)?;
    println!("argmin: {}", fmt_coords(variables, &argmin));
    println!("min = {}", fmt_f64(value));
    Ok(())
}

fn cmd_oracle_saddle(path: &Path, grid: Option<usize>) -> Result<(), CliError> {
    let (problem, options) = expect_scalarize(load_problem(path)?)?;
    let config = OracleConfig {
        grid_points: grid.or(options.grid).unwrap_or(301),
        ..OracleConfig::default()
    };
    let saddle = oracle::brute_force_saddle(&problem, &config)?;
    println!("beta_star: {}", fmt_beta(&saddle.beta));
    println!("r_star: {}", fmt_coords(problem.variables(), &saddle.r_star));
    println!("value = {}", fmt_f64(saddle.value));
    Ok(())
}

fn cmd_oracle_grad(
    path: &Path,
    objective: usize,
    point: Option<Vec<f64>>,
    step: f64,
) -> Result<(), CliError> {
    let loaded = load_problem(path)?;
    let point = resolve_point(point, &loaded.options)?;
    let (objectives, variables) = match &loaded.kind {
        LoadedKind::Kkt(p) => (p.objectives(), p.variables()),
        LoadedKind::Scalarize(p) => (p.objectives(), p.variables()),
    };
    if objective == 0 || objective > objectives.len() {
        return Err(CliError::Usage(format!(
            "--objective {objective} out of range (problem has {})",
            objectives.len()
        )));
    }
    if !(step > 0.0) {
        return Err(CliError::Usage("--step must be positive".into()));
    }
    if point.len() != variables.len() {
        return Err(CliError::Usage(format!(
            "point has {} coordinates, problem has {} variables",
            point.len(),
            variables.len()
        )));
    }
    let grad =
        oracle::finite_difference_gradient(&objectives[objective - 1], variables, &point, step)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    for (name, g) in variables.iter().zip(&grad) {
        println!("dO{objective}/d{name} = {}", fmt_f64(*g));
    }
    Ok(())
}

fn cmd_oracle_cone(
    path: &Path,
    point: Option<Vec<f64>>,
    mu_max: f64,
    step: f64,
    tol: Option<f64>,
) -> Result<(), CliError> {
    let (problem, options) = expect_kkt(load_problem(path)?)?;
    let point = resolve_point(point, &options)?;
    if !(mu_max > 0.0 && step > 0.0) {
        return Err(CliError::Usage("--mu-max and --step must be positive".into()));
    }
    let tol = tol.or(options.tol).unwrap_or(DEFAULT_TOL);
    let active = kkt::active_set(&problem, &point, tol)?;
    if active.is_empty() {
        println!("active: none");
        println!("feasible: false");
        return Ok(());
    }
    let labels: Vec<String> = active.iter().map(|y| format!("C{}", y + 1)).collect();
    println!("active: {}", labels.join(", "));
    let grad_o = crate::expr::gradient(&problem.objectives()[0], problem.variables(), &point)
        .map_err(|e| CliError::Numeric(e.to_string()))?;
    let mut signed = Vec::with_capacity(active.len());
    for &y in &active {
        let constraint = &problem.constraints()[y];
        let g = crate::expr::gradient(&constraint.body, problem.variables(), &point)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
        let s = kkt::stationarity_sign(problem.sense(), &constraint.relation);
        signed.push(g.iter().map(|v| s * v).collect::<Vec<f64>>());
    }
    let feasible = oracle::mu_grid_feasibility(&grad_o, &signed, mu_max, step);
    println!("feasible: {feasible}");
    Ok(())
}
