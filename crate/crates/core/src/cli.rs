//! Command-line front end. Exit codes: 0 success, 2 usage error, 1 runtime
//! failure.

use crate::error::{Error, Result};
use crate::format::{float, opt, opt_float, to_json_string};
use crate::library::{all_problems, get_problem, listing, problem_names};
use crate::metrics::{evaluate, MetricsReport};
use crate::residual::Iterate;
use crate::solver::{solve, RunResult, SmoothingSchedule, SolverConfig, Start};
use crate::studies::{
    default_lambda_grid, detect_lambda_ill, detect_thresholds, partial_calmness_fixture_check,
    reference_error, run_sweep, CellOutcome, LambdaMode, StudyReport, SweepSpec, BLOWUP_FACTOR,
    STUDY_ITERS,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "bilevel-lm",
    version,
    about = "Smoothed Levenberg-Marquardt solver for bilevel programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the problem registry as JSON.
    List,
    /// Solve one problem and write its trace and metrics.
    Solve(SolveArgs),
    /// Fixed-lambda grid plus varying lambda over a problem set.
    Sweep(SweepArgs),
    /// Penalty value at which the Error blows up under varying lambda.
    StudyIll(StudyArgs),
    /// Small and large penalty thresholds reaching 1.1 times the reference Error.
    StudyThreshold(StudyArgs),
    /// Classify varying-lambda traces of the linear lower-level instances.
    StudyCalm(StudyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }

    fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory.
    #[arg(long = "out", env = "BILEVEL_LM_OUT", default_value = "results")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Both)]
    pub format: Format,
    /// Include wall-clock seconds in reports (makes output run-dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub alpha_boost: Option<f64>,
    /// `decreasing` or `fixed:<mu>`.
    #[arg(long, value_parser = parse_mu)]
    pub mu: Option<MuArg>,
    /// Lower bound of the decreasing smoothing schedule.
    #[arg(long)]
    pub mu_floor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuArg {
    Decreasing,
    Fixed(f64),
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(v) = self.eta {
            c.eta = v;
        }
        if let Some(v) = self.epsilon {
            c.epsilon = v;
        }
        if let Some(v) = self.max_iters {
            c.max_iters = v;
        }
        if let Some(v) = self.sigma {
            c.sigma = v;
        }
        if let Some(v) = self.rho {
            c.rho = v;
        }
        if let Some(v) = self.gamma0 {
            c.gamma0 = v;
        }
        if let Some(v) = self.alpha_boost {
            c.alpha_boost = v;
        }
        if let Some(MuArg::Fixed(mu)) = self.mu {
            c.mu_schedule = SmoothingSchedule::Fixed { mu };
        }
        if let (SmoothingSchedule::Decreasing { floor, .. }, Some(v)) =
            (&mut c.mu_schedule, self.mu_floor)
        {
            *floor = v;
        }
        c
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub problem: String,
    /// `fixed:<lambda>` or `varying`.
    #[arg(long, value_parser = parse_lambda, default_value = "varying")]
    pub lambda: LambdaMode,
    /// Accepted for discoverability; the trace CSV is always written and is the plot input.
    #[arg(long)]
    pub emit_plot_data: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Comma-separated names or `all`.
    #[arg(long, default_value = "all")]
    pub problems: String,
    /// Comma-separated fixed penalty values.
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub no_varying: bool,
    /// Write one trace CSV per cell.
    #[arg(long, visible_alias = "emit-plot-data")]
    pub traces: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct StudyArgs {
    /// Comma-separated names or `all`.
    #[arg(long, default_value = "all")]
    pub problems: String,
    #[arg(long, default_value_t = STUDY_ITERS)]
    pub iters: usize,
    #[arg(long, default_value_t = BLOWUP_FACTOR)]
    pub blowup_factor: f64,
    /// Write one trace CSV per problem.
    #[arg(long, visible_alias = "emit-plot-data")]
    pub traces: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_lambda(s: &str) -> std::result::Result<LambdaMode, String> {
    if s == "varying" {
        return Ok(LambdaMode::Varying);
    }
    let value = s
        .strip_prefix("fixed:")
        .ok_or_else(|| format!("expected `fixed:<value>` or `varying`, got `{s}`"))?;
    let lambda: f64 = value
        .parse()
        .map_err(|e| format!("bad lambda `{value}`: {e}"))?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(format!("lambda must be positive, got {lambda}"));
    }
    Ok(LambdaMode::Fixed(lambda))
}

fn parse_mu(s: &str) -> std::result::Result<MuArg, String> {
    if s == "decreasing" {
        return Ok(MuArg::Decreasing);
    }
    let value = s
        .strip_prefix("fixed:")
        .ok_or_else(|| format!("expected `fixed:<value>` or `decreasing`, got `{s}`"))?;
    value
        .parse()
        .map(MuArg::Fixed)
        .map_err(|e| format!("bad mu `{value}`: {e}"))
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnknownProblem { .. } | Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(cli: Cli) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::List => {
            let json = to_json_string(&listing()).map_err(Error::from)?;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(json.as_bytes()).map_err(Error::from)?;
            Ok(())
        }
        Command::Solve(args) => cmd_solve(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::StudyIll(args) => cmd_study_ill(&args),
        Command::StudyThreshold(args) => cmd_study_threshold(&args),
        Command::StudyCalm(args) => cmd_study_calm(&args),
    }
}

fn resolve_problems(spec: &str) -> Result<Vec<String>> {
    if spec == "all" {
        return Ok(problem_names().into_iter().map(String::from).collect());
    }
    let names: Vec<String> = spec
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    for name in &names {
        get_problem(name)?;
    }
    Ok(names)
}

fn file_tag(mode: LambdaMode) -> String {
    match mode {
        LambdaMode::Fixed(l) => format!("fixed_{l:e}"),
        LambdaMode::Varying => "varying".to_string(),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

pub const TRACE_COLUMNS: [&str; 8] = [
    "iter",
    "lambda",
    "mu",
    "alpha",
    "gamma",
    "backtracks",
    "residual_smoothed",
    "residual_unsmoothed",
];

pub fn trace_csv(run: &RunResult) -> Result<String> {
    csv_string(
        &TRACE_COLUMNS,
        run.trace.iter().map(|r| {
            vec![
                r.k.to_string(),
                float(r.lambda),
                float(r.mu),
                opt_float(r.alpha),
                opt_float(r.gamma),
                opt(r.backtracks),
                float(r.residual_norm),
                float(r.unsmoothed_residual_norm),
            ]
        }),
    )
}

#[derive(Serialize)]
struct SolveReport<'a> {
    problem: &'a str,
    lambda_mode: LambdaMode,
    config: &'a SolverConfig,
    metrics: &'a MetricsReport,
    final_iterate: &'a Iterate,
    #[serde(skip_serializing_if = "Option::is_none")]
    cpu_seconds: Option<f64>,
}

fn cmd_solve(args: &SolveArgs) -> std::result::Result<(), Failure> {
    let problem = get_problem(&args.problem)?;
    let config = args.solver.config().with_lambda(args.lambda.schedule());
    config.validate()?;
    let cell = |e: Error| {
        Failure::Runtime(format!(
            "problem {}, lambda {}: {e}",
            args.problem,
            args.lambda.label()
        ))
    };
    let run = solve(problem.as_ref(), &config, Start::Default).map_err(cell)?;
    let metrics = evaluate(problem.as_ref(), &run, config.epsilon).map_err(cell)?;

    let stem = format!("{}__{}", args.problem, file_tag(args.lambda));
    let out = &args.output;
    if out.format.csv() {
        write_file(
            &out.out.join(format!("{stem}.trace.csv")),
            &trace_csv(&run)?,
        )?;
    }
    if out.format.json() {
        let report = SolveReport {
            problem: &args.problem,
            lambda_mode: args.lambda,
            config: &config,
            metrics: &metrics,
            final_iterate: &run.final_z,
            cpu_seconds: out.timing.then_some(metrics.cpu_seconds),
        };
        write_file(
            &out.out.join(format!("{stem}.metrics.json")),
            &to_json_string(&report).map_err(Error::from)?,
        )?;
    }
    println!(
        "{} {}: stop={} iterations={} error={} upper_rel_error={}",
        args.problem,
        args.lambda.label(),
        metrics.stop_reason.label(),
        metrics.iterations,
        float(metrics.final_error),
        opt_float(metrics.upper_rel_error),
    );
    Ok(())
}

const SWEEP_COLUMNS: [&str; 16] = [
    "problem",
    "mode",
    "lambda",
    "status",
    "stop_reason",
    "iterations",
    "final_error",
    "final_stepsize",
    "eoc",
    "eoc_status",
    "upper_rel_error",
    "lower_rel_error",
    "upper_value",
    "lower_value",
    "lower_level_feasible",
    "cpu_seconds",
];

fn json_label<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(String::from))
        .unwrap_or_default()
}

fn sweep_rows(report: &StudyReport, timing: bool) -> Vec<Vec<String>> {
    report
        .cells
        .iter()
        .map(|cell| {
            let (kind, lambda) = match cell.mode {
                LambdaMode::Fixed(l) => ("fixed", float(l)),
                LambdaMode::Varying => ("varying", String::new()),
            };
            let mut row = vec![cell.problem.clone(), kind.to_string(), lambda];
            match &cell.outcome {
                CellOutcome::Completed { metrics: m, .. } => row.extend([
                    "completed".to_string(),
                    m.stop_reason.label().to_string(),
                    m.iterations.to_string(),
                    float(m.final_error),
                    opt_float(m.final_stepsize),
                    opt_float(m.eoc),
                    json_label(&m.eoc_status),
                    opt_float(m.upper_rel_error),
                    opt_float(m.lower_rel_error),
                    float(m.upper_value),
                    float(m.lower_value),
                    opt(m.lower_level_feasible),
                    if timing {
                        float(m.cpu_seconds)
                    } else {
                        String::new()
                    },
                ]),
                CellOutcome::Failed(msg) => {
                    row.push(format!("failed: {msg}"));
                    row.resize(SWEEP_COLUMNS.len(), String::new());
                }
            }
            row
        })
        .collect()
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    problems: &'a [String],
    fixed_lambdas: &'a [f64],
    include_varying: bool,
    config: &'a SolverConfig,
    cells: usize,
    failed_cells: Vec<String>,
    best_fixed: &'a [crate::studies::BestLambda],
    recovery_best_fixed: &'a crate::studies::Recovery,
    recovery_varying: Option<&'a crate::studies::Recovery>,
}

fn cmd_sweep(args: &SweepArgs) -> std::result::Result<(), Failure> {
    let problems = resolve_problems(&args.problems)?;
    let config = args.solver.config();
    config.validate()?;
    let mut spec = SweepSpec::new(problems);
    spec.fixed_lambdas = args.lambdas.clone().unwrap_or_else(default_lambda_grid);
    if let Some(bad) = spec.fixed_lambdas.iter().find(|l| !(**l > 0.0)) {
        return Err(Failure::Usage(format!(
            "fixed lambda must be positive, got {bad}"
        )));
    }
    spec.include_varying = !args.no_varying;
    spec.config = config;
    let report = run_sweep(&spec)?;

    let dir = args.output.out.join("sweep");
    if args.output.format.csv() {
        write_file(
            &dir.join("cells.csv"),
            &csv_string(&SWEEP_COLUMNS, sweep_rows(&report, args.output.timing))?,
        )?;
    }
    if args.traces {
        for cell in &report.cells {
            if let Some(run) = cell.run() {
                let name = format!("{}__{}.trace.csv", cell.problem, file_tag(cell.mode));
                write_file(&dir.join("traces").join(name), &trace_csv(run)?)?;
            }
        }
    }
    let failed_cells: Vec<String> = report
        .cells
        .iter()
        .filter_map(|c| match &c.outcome {
            CellOutcome::Failed(msg) => Some(format!(
                "problem {}, lambda {}: {msg}",
                c.problem,
                c.mode.label()
            )),
            CellOutcome::Completed { .. } => None,
        })
        .collect();
    for msg in &failed_cells {
        eprintln!("warning: {msg}");
    }
    if args.output.format.json() {
        let summary = SweepSummary {
            problems: &spec.problems,
            fixed_lambdas: &spec.fixed_lambdas,
            include_varying: spec.include_varying,
            config: &spec.config,
            cells: report.cells.len(),
            failed_cells,
            best_fixed: &report.best,
            recovery_best_fixed: &report.recovery_best_fixed,
            recovery_varying: report.recovery_varying.as_ref(),
        };
        write_file(
            &dir.join("summary.json"),
            &to_json_string(&summary).map_err(Error::from)?,
        )?;
    }
    for count in &report.recovery_best_fixed.counts {
        println!(
            "best fixed lambda: {}/{} within {}",
            count.recovered, report.recovery_best_fixed.eligible, count.threshold
        );
    }
    Ok(())
}

/// Write `<name>.csv` and `<name>.json` for a study.
fn write_study<R: Serialize>(
    args: &StudyArgs,
    name: &str,
    header: &[&str],
    rows: &[R],
    to_row: impl Fn(&R) -> Vec<String>,
    config: &SolverConfig,
) -> Result<()> {
    let dir = args.output.out.join(name);
    if args.output.format.csv() {
        write_file(
            &dir.join(format!("{name}.csv")),
            &csv_string(header, rows.iter().map(to_row))?,
        )?;
    }
    if args.output.format.json() {
        #[derive(Serialize)]
        struct Summary<'a, R> {
            iterations: usize,
            config: &'a SolverConfig,
            rows: &'a [R],
        }
        let summary = Summary {
            iterations: args.iters,
            config,
            rows,
        };
        write_file(
            &dir.join(format!("{name}.json")),
            &to_json_string(&summary)?,
        )?;
    }
    Ok(())
}

fn write_study_trace(args: &StudyArgs, study: &str, problem: &str, run: &RunResult) -> Result<()> {
    if args.traces {
        let path = args
            .output
            .out
            .join(study)
            .join("traces")
            .join(format!("{problem}.trace.csv"));
        write_file(&path, &trace_csv(run)?)?;
    }
    Ok(())
}

fn study_config(args: &StudyArgs) -> std::result::Result<SolverConfig, Failure> {
    let config = args.solver.config();
    config.validate()?;
    if args.iters == 0 {
        return Err(Failure::Usage("iters must be positive".into()));
    }
    Ok(config)
}

fn cmd_study_ill(args: &StudyArgs) -> std::result::Result<(), Failure> {
    let names = resolve_problems(&args.problems)?;
    let config = study_config(args)?;
    let mut rows = Vec::new();
    for name in &names {
        let problem = get_problem(name)?;
        let study = detect_lambda_ill(
            problem.as_ref(),
            &config,
            Start::Default,
            args.iters,
            args.blowup_factor,
        )
        .map_err(|e| Failure::Runtime(format!("problem {name}, lambda varying: {e}")))?;
        write_study_trace(args, "ill", name, &study.run)?;
        println!("{name}: lambda_ill={}", opt_float(study.row.lambda_ill));
        rows.push(study.row);
    }
    let header = [
        "problem",
        "observed",
        "lambda_ill",
        "blowup_iteration",
        "blowup_factor",
        "iterations_run",
    ];
    write_study(
        args,
        "ill",
        &header,
        &rows,
        |r| {
            vec![
                r.problem.clone(),
                r.observed.to_string(),
                opt_float(r.lambda_ill),
                opt(r.blowup_iteration),
                float(r.blowup_factor),
                r.iterations_run.to_string(),
            ]
        },
        &config,
    )?;
    Ok(())
}

fn cmd_study_threshold(args: &StudyArgs) -> std::result::Result<(), Failure> {
    let names = resolve_problems(&args.problems)?;
    let config = study_config(args)?;
    let mut rows = Vec::new();
    for name in &names {
        let problem = get_problem(name)?;
        let cell = |e: Error| Failure::Runtime(format!("problem {name}, lambda varying: {e}"));
        let error_star =
            reference_error(problem.as_ref(), &config, Start::Default).map_err(cell)?;
        let row = detect_thresholds(
            problem.as_ref(),
            &config,
            Start::Default,
            error_star,
            args.iters,
        )
        .map_err(cell)?;
        println!(
            "{name}: lambda_bar={} lambda_star={}",
            opt_float(row.lambda_bar),
            opt_float(row.lambda_star)
        );
        rows.push(row);
    }
    let header = [
        "problem",
        "error_star",
        "k_bar",
        "lambda_bar",
        "k_star",
        "lambda_star",
    ];
    write_study(
        args,
        "threshold",
        &header,
        &rows,
        |r| {
            vec![
                r.problem.clone(),
                float(r.error_star),
                opt(r.k_bar),
                opt_float(r.lambda_bar),
                opt(r.k_star),
                opt_float(r.lambda_star),
            ]
        },
        &config,
    )?;
    Ok(())
}

fn cmd_study_calm(args: &StudyArgs) -> std::result::Result<(), Failure> {
    let names = if args.problems == "all" {
        all_problems()
            .iter()
            .filter(|p| p.has_linear_lower_level())
            .map(|p| p.name().to_string())
            .collect()
    } else {
        resolve_problems(&args.problems)?
    };
    let config = study_config(args)?;
    let mut rows = Vec::new();
    for name in &names {
        let problem = get_problem(name)?;
        let study =
            partial_calmness_fixture_check(problem.as_ref(), &config, Start::Default, args.iters)
                .map_err(|e| Failure::Runtime(format!("problem {name}, lambda varying: {e}")))?;
        write_study_trace(args, "calm", name, &study.run)?;
        println!("{name}: {}", json_label(&study.row.class));
        rows.push(study.row);
    }
    let header = [
        "problem",
        "class",
        "reversals",
        "blowup_iteration",
        "min_error",
        "final_error",
        "blowup_factor",
        "zigzag_min_reversals",
        "zigzag_decades",
    ];
    write_study(
        args,
        "calm",
        &header,
        &rows,
        |r| {
            vec![
                r.problem.clone(),
                json_label(&r.class),
                r.reversals.to_string(),
                opt(r.blowup_iteration),
                float(r.min_error),
                float(r.final_error),
                float(r.blowup_factor),
                r.zigzag_min_reversals.to_string(),
                float(r.zigzag_decades),
            ]
        },
        &config,
    )?;
    Ok(())
}
