//! Penalty-parameter studies: fixed/varying sweeps, ill-behaviour detection,
//! Error thresholds and trace classification for partially calm instances.

use crate::error::Result;
use crate::library::get_problem;
use crate::metrics::{evaluate, MetricsReport};
use crate::problem::BilevelProblem;
use crate::solver::{
    solve, PenaltySchedule, RunResult, SolverConfig, Start, StoppingProfile, StudyStop,
};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// Sustained departure factor over the running minimum that counts as a blow-up.
pub const BLOWUP_FACTOR: f64 = 1e3;
/// Error target relative to the reference Error for the threshold study.
pub const THRESHOLD_FACTOR: f64 = 1.1;
/// The large threshold only counts iterations beyond this one.
pub const THRESHOLD_MIN_ITER: usize = 50;
/// Reversals of at least [`ZIGZAG_DECADES`] needed to call a trace zigzag.
pub const ZIGZAG_MIN_REVERSALS: usize = 5;
pub const ZIGZAG_DECADES: f64 = 1.0;
/// Errors below this are treated as equal when counting reversals.
pub const ZIGZAG_NOISE_FLOOR: f64 = 1e-10;
/// Iteration budget of the studies.
pub const STUDY_ITERS: usize = 1000;
/// Recovery thresholds on the absolute upper-level relative error.
pub const RECOVERY_THRESHOLDS: [f64; 3] = [0.10, 0.20, 0.25];

/// `{1e6, 1e5, ..., 1e-3}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (-3..=6).rev().map(|e| 10f64.powi(e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "lambda", rename_all = "snake_case")]
pub enum LambdaMode {
    Fixed(f64),
    Varying,
}

impl LambdaMode {
    pub fn schedule(&self) -> PenaltySchedule {
        match *self {
            Self::Fixed(lambda) => PenaltySchedule::fixed(lambda),
            Self::Varying => PenaltySchedule::varying(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Fixed(lambda) => format!("fixed:{lambda:e}"),
            Self::Varying => "varying".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub problems: Vec<String>,
    pub fixed_lambdas: Vec<f64>,
    pub include_varying: bool,
    /// Base configuration; the penalty schedule is set per cell.
    pub config: SolverConfig,
    /// Per-problem starting points; others use [`Start::Default`].
    pub starts: BTreeMap<String, Start>,
}

impl SweepSpec {
    pub fn new(problems: Vec<String>) -> Self {
        Self {
            problems,
            fixed_lambdas: default_lambda_grid(),
            include_varying: true,
            config: SolverConfig::default(),
            starts: BTreeMap::new(),
        }
    }

    pub fn modes(&self) -> Vec<LambdaMode> {
        let mut modes: Vec<LambdaMode> = self
            .fixed_lambdas
            .iter()
            .map(|&l| LambdaMode::Fixed(l))
            .collect();
        if self.include_varying {
            modes.push(LambdaMode::Varying);
        }
        modes
    }
}

/// Outcome of one (problem, lambda mode) run.
#[derive(Debug, Clone)]
pub enum CellOutcome {
    Completed {
        run: Box<RunResult>,
        metrics: MetricsReport,
    },
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub problem: String,
    pub mode: LambdaMode,
    pub outcome: CellOutcome,
}

impl SweepCell {
    pub fn metrics(&self) -> Option<&MetricsReport> {
        match &self.outcome {
            CellOutcome::Completed { metrics, .. } => Some(metrics),
            CellOutcome::Failed(_) => None,
        }
    }

    pub fn run(&self) -> Option<&RunResult> {
        match &self.outcome {
            CellOutcome::Completed { run, .. } => Some(run.as_ref()),
            CellOutcome::Failed(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestLambda {
    pub problem: String,
    pub lambda: f64,
    pub upper_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryCount {
    pub threshold: f64,
    pub recovered: usize,
    pub percent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recovery {
    /// Problems with a known solution and a completed cell for this mode.
    pub eligible: usize,
    pub counts: Vec<RecoveryCount>,
}

impl Recovery {
    fn from_errors(errors: &[f64]) -> Self {
        let eligible = errors.len();
        let counts = RECOVERY_THRESHOLDS
            .iter()
            .map(|&threshold| {
                let recovered = errors.iter().filter(|e| e.abs() <= threshold).count();
                let percent = if eligible == 0 {
                    0.0
                } else {
                    100.0 * recovered as f64 / eligible as f64
                };
                RecoveryCount {
                    threshold,
                    recovered,
                    percent,
                }
            })
            .collect();
        Self { eligible, counts }
    }

    pub fn recovered_within(&self, threshold: f64) -> Option<usize> {
        self.counts
            .iter()
            .find(|c| c.threshold == threshold)
            .map(|c| c.recovered)
    }
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub cells: Vec<SweepCell>,
    pub best: Vec<BestLambda>,
    /// Using each problem's best fixed lambda.
    pub recovery_best_fixed: Recovery,
    pub recovery_varying: Option<Recovery>,
}

impl StudyReport {
    pub fn cell(&self, problem: &str, mode: LambdaMode) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.problem == problem && c.mode == mode)
    }
}

/// Fixed lambda minimizing `|upper_rel_error|`, ties toward the smaller lambda.
pub fn best_fixed_lambda<'a>(cells: impl IntoIterator<Item = &'a SweepCell>) -> Option<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for cell in cells {
        let (LambdaMode::Fixed(lambda), Some(err)) =
            (cell.mode, cell.metrics().and_then(|m| m.upper_rel_error))
        else {
            continue;
        };
        if !err.is_finite() {
            continue;
        }
        let better = match best {
            None => true,
            Some((bl, be)) => err.abs() < be.abs() || (err.abs() == be.abs() && lambda < bl),
        };
        if better {
            best = Some((lambda, err));
        }
    }
    best
}

fn run_cell(problem: &dyn BilevelProblem, config: &SolverConfig, start: Start) -> CellOutcome {
    let outcome = solve(problem, config, start).and_then(|run| {
        let metrics = evaluate(problem, &run, config.epsilon)?;
        Ok(CellOutcome::Completed {
            run: Box::new(run),
            metrics,
        })
    });
    outcome.unwrap_or_else(|e| CellOutcome::Failed(e.to_string()))
}

/// Run every (problem, mode) cell. Cells run in parallel; the result order is
/// problem-major in the order given, then grid order, then varying.
pub fn run_sweep(spec: &SweepSpec) -> Result<StudyReport> {
    let problems = spec
        .problems
        .iter()
        .map(|n| get_problem(n))
        .collect::<Result<Vec<_>>>()?;
    spec.config.validate()?;
    let modes = spec.modes();
    let jobs: Vec<(usize, LambdaMode)> = (0..problems.len())
        .flat_map(|i| modes.iter().map(move |&m| (i, m)))
        .collect();

    let cells: Vec<SweepCell> = jobs
        .par_iter()
        .map(|&(i, mode)| {
            let problem = problems[i].as_ref();
            let config = spec.config.clone().with_lambda(mode.schedule());
            let start = spec.starts.get(problem.name()).cloned().unwrap_or_default();
            SweepCell {
                problem: problem.name().to_string(),
                mode,
                outcome: run_cell(problem, &config, start),
            }
        })
        .collect();

    let mut best = Vec::new();
    let mut varying_errors = Vec::new();
    for problem in &problems {
        let own = || cells.iter().filter(|c| c.problem == problem.name());
        if let Some((lambda, upper_rel_error)) = best_fixed_lambda(own()) {
            best.push(BestLambda {
                problem: problem.name().to_string(),
                lambda,
                upper_rel_error,
            });
        }
        let varying = own().find(|c| c.mode == LambdaMode::Varying);
        if let Some(err) = varying
            .and_then(|c| c.metrics())
            .and_then(|m| m.upper_rel_error)
        {
            varying_errors.push(err);
        }
    }
    let best_errors: Vec<f64> = best.iter().map(|b| b.upper_rel_error).collect();
    Ok(StudyReport {
        recovery_best_fixed: Recovery::from_errors(&best_errors),
        recovery_varying: spec
            .include_varying
            .then(|| Recovery::from_errors(&varying_errors)),
        cells,
        best,
    })
}

/// First `k` where `errors[k]` is non-finite, or exceeds `factor` times the
/// minimum of `errors[..k]` and no later entry falls below that minimum.
pub fn find_blowup(errors: &[f64], factor: f64) -> Option<usize> {
    // suffix_min[k] = min over errors[k..], ignoring non-finite entries.
    let mut suffix_min = vec![f64::INFINITY; errors.len() + 1];
    for k in (0..errors.len()).rev() {
        let e = if errors[k].is_finite() {
            errors[k]
        } else {
            f64::INFINITY
        };
        suffix_min[k] = suffix_min[k + 1].min(e);
    }
    let mut running_min = f64::INFINITY;
    for (k, &e) in errors.iter().enumerate() {
        if !e.is_finite() {
            return Some(k);
        }
        if running_min.is_finite() && e > factor * running_min && suffix_min[k + 1] >= running_min {
            return Some(k);
        }
        running_min = running_min.min(e);
    }
    None
}

/// `0.5 * 1.05^k`.
pub fn varying_lambda_at(k: usize) -> f64 {
    PenaltySchedule::varying().value(k)
}

/// A study row together with the run it was computed from.
#[derive(Debug, Clone)]
pub struct StudyRun<R> {
    pub row: R,
    pub run: RunResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IllBehaviourRow {
    pub problem: String,
    pub observed: bool,
    pub lambda_ill: Option<f64>,
    pub blowup_iteration: Option<usize>,
    pub blowup_factor: f64,
    pub iterations_run: usize,
}

fn unguarded(config: &SolverConfig, iters: usize, target: StudyStop) -> SolverConfig {
    SolverConfig {
        max_iters: iters,
        lambda_schedule: PenaltySchedule::varying(),
        stopping: StoppingProfile::StudyOverride(target),
        ..config.clone()
    }
}

/// Varying-lambda run with all stopping criteria disabled; report where the
/// Error blows up.
pub fn detect_lambda_ill(
    problem: &dyn BilevelProblem,
    config: &SolverConfig,
    start: Start,
    iters: usize,
    factor: f64,
) -> Result<StudyRun<IllBehaviourRow>> {
    let run = solve(
        problem,
        &unguarded(config, iters, StudyStop::default()),
        start,
    )?;
    let blowup = find_blowup(&run.errors(), factor);
    let row = IllBehaviourRow {
        problem: problem.name().to_string(),
        observed: blowup.is_some(),
        lambda_ill: blowup.map(varying_lambda_at),
        blowup_iteration: blowup,
        blowup_factor: factor,
        iterations_run: run.final_record().k,
    };
    Ok(StudyRun { row, run })
}

/// First `k > after` (any `k` when `after` is `None`) with `errors[k] <= target`.
pub fn first_at_most(errors: &[f64], target: f64, after: Option<usize>) -> Option<usize> {
    let start = after.map_or(0, |a| a + 1);
    (start..errors.len()).find(|&k| errors[k] <= target)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub problem: String,
    pub error_star: f64,
    pub lambda_bar: Option<f64>,
    pub k_bar: Option<usize>,
    pub lambda_star: Option<f64>,
    pub k_star: Option<usize>,
}

/// Error of the default varying-lambda solve, the reference for thresholds.
pub fn reference_error(
    problem: &dyn BilevelProblem,
    config: &SolverConfig,
    start: Start,
) -> Result<f64> {
    let cfg = config.clone().with_lambda(PenaltySchedule::varying());
    Ok(solve(problem, &cfg, start)?.final_error())
}

/// Small and large lambda thresholds at which `Error <= 1.1 error_star`.
pub fn detect_thresholds(
    problem: &dyn BilevelProblem,
    config: &SolverConfig,
    start: Start,
    error_star: f64,
    iters: usize,
) -> Result<ThresholdRow> {
    let target = THRESHOLD_FACTOR * error_star;
    let small = StudyStop {
        error_at_most: Some(target),
        after_iter: None,
    };
    let large = StudyStop {
        error_at_most: Some(target),
        after_iter: Some(THRESHOLD_MIN_ITER),
    };
    let hit = |stop: StudyStop| -> Result<Option<usize>> {
        let run = solve(problem, &unguarded(config, iters, stop), start.clone())?;
        Ok(first_at_most(&run.errors(), target, stop.after_iter))
    };
    let k_bar = hit(small)?;
    let k_star = hit(large)?;
    Ok(ThresholdRow {
        problem: problem.name().to_string(),
        error_star,
        lambda_bar: k_bar.map(varying_lambda_at),
        k_bar,
        lambda_star: k_star.map(varying_lambda_at),
        k_star,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceClass {
    RetainThenBlowup,
    Zigzag,
    Stable,
}

/// Reversals in `log10(max(e, floor))` of at least `decades`, counted with
/// hysteresis against the latest extreme.
pub fn count_reversals(errors: &[f64], decades: f64) -> usize {
    let logs: Vec<f64> = errors
        .iter()
        .map(|&e| {
            if e.is_finite() {
                e.max(ZIGZAG_NOISE_FLOOR).log10()
            } else {
                f64::MAX.log10()
            }
        })
        .collect();
    let Some(&first) = logs.first() else { return 0 };
    let (mut hi, mut lo) = (first, first);
    // +1 while rising, -1 while falling, 0 before the first decade move.
    let mut direction = 0i8;
    let mut reversals = 0;
    for &v in &logs[1..] {
        match direction {
            0 => {
                if v >= lo + decades {
                    direction = 1;
                    hi = v;
                } else if v <= hi - decades {
                    direction = -1;
                    lo = v;
                }
                hi = hi.max(v);
                lo = lo.min(v);
            }
            1 => {
                if v > hi {
                    hi = v;
                } else if v <= hi - decades {
                    direction = -1;
                    lo = v;
                    reversals += 1;
                }
            }
            _ => {
                if v < lo {
                    lo = v;
                } else if v >= lo + decades {
                    direction = 1;
                    hi = v;
                    reversals += 1;
                }
            }
        }
    }
    reversals
}

/// Zigzag is tested first, then a sustained blow-up.
pub fn classify_trace(errors: &[f64]) -> TraceClass {
    if count_reversals(errors, ZIGZAG_DECADES) >= ZIGZAG_MIN_REVERSALS {
        TraceClass::Zigzag
    } else if find_blowup(errors, BLOWUP_FACTOR).is_some() {
        TraceClass::RetainThenBlowup
    } else {
        TraceClass::Stable
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalmTraceRow {
    pub problem: String,
    pub class: TraceClass,
    pub reversals: usize,
    pub blowup_iteration: Option<usize>,
    pub min_error: f64,
    pub final_error: f64,
    pub blowup_factor: f64,
    pub zigzag_min_reversals: usize,
    pub zigzag_decades: f64,
}

/// Classify the varying-lambda trace of a partially calm instance run with
/// all stopping criteria disabled.
pub fn partial_calmness_fixture_check(
    problem: &dyn BilevelProblem,
    config: &SolverConfig,
    start: Start,
    iters: usize,
) -> Result<StudyRun<CalmTraceRow>> {
    let run = solve(
        problem,
        &unguarded(config, iters, StudyStop::default()),
        start,
    )?;
    let errors = run.errors();
    let row = CalmTraceRow {
        problem: problem.name().to_string(),
        class: classify_trace(&errors),
        reversals: count_reversals(&errors, ZIGZAG_DECADES),
        blowup_iteration: find_blowup(&errors, BLOWUP_FACTOR),
        min_error: errors
            .iter()
            .copied()
            .filter(|e| e.is_finite())
            .fold(f64::INFINITY, f64::min),
        final_error: run.final_error(),
        blowup_factor: BLOWUP_FACTOR,
        zigzag_min_reversals: ZIGZAG_MIN_REVERSALS,
        zigzag_decades: ZIGZAG_DECADES,
    };
    Ok(StudyRun { row, run })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{ALLENDE_STILL, LAMPARIELLO_SAGRATELLA};
    use crate::residual::Iterate;
    use nalgebra::dvector;

    #[test]
    fn grid_has_ten_values() {
        let grid = default_lambda_grid();
        assert_eq!(grid.len(), 10);
        assert_eq!(grid[0], 1e6);
        assert_eq!(grid[9], 1e-3);
    }

    #[test]
    fn lambda_at_51() {
        let l = varying_lambda_at(51);
        assert_eq!(format!("{:.2}", l), "6.02");
    }

    #[test]
    fn sweep_cell_count_and_exact_root() {
        let mut spec = SweepSpec::new(vec![
            LAMPARIELLO_SAGRATELLA.into(),
            "QuadraticTracking".into(),
        ]);
        let z_bar = Iterate::new(
            dvector![0.5],
            dvector![0.0, 0.5],
            dvector![1.0, 0.01, 0.0],
            dvector![0.0],
            dvector![0.0, 1.0, 0.0],
        );
        spec.starts
            .insert(LAMPARIELLO_SAGRATELLA.into(), Start::Full(z_bar));
        let report = run_sweep(&spec).unwrap();
        assert_eq!(report.cells.len(), 22);
        let cell = report
            .cell(LAMPARIELLO_SAGRATELLA, LambdaMode::Fixed(1e-2))
            .unwrap();
        let m = cell.metrics().unwrap();
        assert_eq!(m.iterations, 0);
        assert!(m.upper_rel_error.unwrap().abs() < 1e-12);
    }

    #[test]
    fn sweep_rows_permute_with_problem_list() {
        let names = ["CalmLinearAbs", "CoupledProjection"];
        let mut a = SweepSpec::new(names.iter().map(|s| s.to_string()).collect());
        a.fixed_lambdas = vec![1.0, 1e-2];
        let mut b = a.clone();
        b.problems.reverse();
        let ra = run_sweep(&a).unwrap();
        let rb = run_sweep(&b).unwrap();
        for cell in &ra.cells {
            let other = rb.cell(&cell.problem, cell.mode).unwrap();
            assert_eq!(cell.run().unwrap().trace, other.run().unwrap().trace);
        }
        assert_eq!(ra.cells[0].problem, names[0]);
        assert_eq!(rb.cells[0].problem, names[1]);
    }

    #[test]
    fn unknown_problem_rejected() {
        assert!(run_sweep(&SweepSpec::new(vec!["nope".into()])).is_err());
    }

    fn fake_cell(mode: LambdaMode, err: f64) -> SweepCell {
        let problem = crate::library::get_problem("QuadraticTracking").unwrap();
        let run = solve(problem.as_ref(), &SolverConfig::default(), Start::Default).unwrap();
        let mut metrics = evaluate(problem.as_ref(), &run, 1e-5).unwrap();
        metrics.upper_rel_error = Some(err);
        SweepCell {
            problem: "p".into(),
            mode,
            outcome: CellOutcome::Completed {
                run: Box::new(run),
                metrics,
            },
        }
    }

    #[test]
    fn best_lambda_ties_go_to_smaller() {
        let cells = vec![
            fake_cell(LambdaMode::Fixed(10.0), 0.05),
            fake_cell(LambdaMode::Fixed(1.0), -0.05),
            fake_cell(LambdaMode::Fixed(100.0), 0.2),
            fake_cell(LambdaMode::Varying, 0.0),
        ];
        assert_eq!(best_fixed_lambda(&cells), Some((1.0, -0.05)));
    }

    #[test]
    fn recovery_counts_use_absolute_error() {
        let r = Recovery::from_errors(&[0.05, -0.15, 0.22, -0.5]);
        assert_eq!(r.recovered_within(0.10), Some(1));
        assert_eq!(r.recovered_within(0.20), Some(2));
        assert_eq!(r.recovered_within(0.25), Some(3));
        assert_eq!(r.counts[2].percent, 75.0);
    }

    #[test]
    fn blowup_detection() {
        let decreasing: Vec<f64> = (0..1000).map(|k| 1.0 / (1.0 + k as f64)).collect();
        assert_eq!(find_blowup(&decreasing, BLOWUP_FACTOR), None);

        let mut overflow = vec![1e-3; 1000];
        overflow[600] = f64::INFINITY;
        let k = find_blowup(&overflow, BLOWUP_FACTOR).unwrap();
        assert_eq!(k, 600);
        assert_eq!(varying_lambda_at(k), 0.5 * 1.05f64.powi(600));

        // A transient spike that comes back below the minimum is not sustained.
        let mut spike = vec![1e-3; 100];
        spike[40] = 10.0;
        spike[60] = 1e-4;
        assert_eq!(find_blowup(&spike, BLOWUP_FACTOR), None);

        let mut sustained = vec![1e-3; 100];
        for e in &mut sustained[70..] {
            *e = 5.0;
        }
        assert_eq!(find_blowup(&sustained, BLOWUP_FACTOR), Some(70));
    }

    #[test]
    fn threshold_crossings() {
        // Reaches the target at k = 12, rises, and returns at k = 190.
        let mut errors = vec![1.0; 300];
        errors[12] = 0.1;
        for e in &mut errors[190..] {
            *e = 0.1;
        }
        let small = first_at_most(&errors, 0.11, None).unwrap();
        let large = first_at_most(&errors, 0.11, Some(THRESHOLD_MIN_ITER)).unwrap();
        assert_eq!((small, large), (12, 190));
        assert!((varying_lambda_at(12) - 0.898).abs() < 1e-3);
        assert!((varying_lambda_at(190) - 0.5 * 1.05f64.powi(190)).abs() < 1e-9);

        let flat_from_51: Vec<f64> = (0..300).map(|k| if k >= 51 { 0.1 } else { 1.0 }).collect();
        let k = first_at_most(&flat_from_51, 0.11, Some(THRESHOLD_MIN_ITER)).unwrap();
        assert_eq!(k, 51);
        assert_eq!(first_at_most(&[1.0, 2.0], 0.5, None), None);
    }

    #[test]
    fn thresholds_are_ordered() {
        let prob = crate::library::get_problem("CalmLinearAbs").unwrap();
        let cfg = SolverConfig::default();
        let e_star = reference_error(prob.as_ref(), &cfg, Start::Default).unwrap();
        let row = detect_thresholds(prob.as_ref(), &cfg, Start::Default, e_star, 300).unwrap();
        if let (Some(a), Some(b)) = (row.lambda_bar, row.lambda_star) {
            assert!(a <= b);
        }
        if let Some(k) = row.k_star {
            assert!(k > THRESHOLD_MIN_ITER);
        }
    }

    #[test]
    fn trace_classes() {
        let monotone: Vec<f64> = (0..1000).map(|k| 10f64.powf(-(k as f64) / 100.0)).collect();
        assert_eq!(classify_trace(&monotone), TraceClass::Stable);

        let blowup: Vec<f64> = (0..1000)
            .map(|k| {
                if k < 500 {
                    1e-6
                } else {
                    1e-6 * 10f64.powf((k - 500) as f64 / 50.0).min(1e6)
                }
            })
            .collect();
        assert_eq!(classify_trace(&blowup), TraceClass::RetainThenBlowup);

        let alternating: Vec<f64> = (0..1000)
            .map(|k| if (k / 50) % 2 == 0 { 1e-6 } else { 1e-2 })
            .collect();
        assert_eq!(classify_trace(&alternating), TraceClass::Zigzag);
        assert!(count_reversals(&alternating, ZIGZAG_DECADES) >= 18);
    }

    #[test]
    fn small_oscillations_are_not_reversals() {
        let wobble: Vec<f64> = (0..200)
            .map(|k| if k % 2 == 0 { 1e-3 } else { 5e-3 })
            .collect();
        assert_eq!(count_reversals(&wobble, ZIGZAG_DECADES), 0);
    }

    #[test]
    fn ill_detection_runs_on_library_problem() {
        let prob = crate::library::get_problem(ALLENDE_STILL).unwrap();
        let row = detect_lambda_ill(
            prob.as_ref(),
            &SolverConfig::default(),
            Start::Default,
            200,
            BLOWUP_FACTOR,
        )
        .unwrap()
        .row;
        assert_eq!(row.observed, row.lambda_ill.is_some());
        assert_eq!(row.observed, row.blowup_iteration.is_some());
    }
}
