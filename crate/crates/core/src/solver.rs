//! Smoothed Levenberg-Marquardt iteration with Armijo backtracking.
//!
//! Each iteration `k` evaluates the residual at `(lambda_k, mu_k)`, solves
//! `(J'J + alpha_k I) d = -J'r` and backtracks along `d` on the squared
//! smoothed residual norm. Stopping follows the six safeguard criteria on the
//! unsmoothed norm (`Error`), evaluated before the step is taken.

use crate::error::{Error, Result};
use crate::jacobian::{assemble_jacobian, JacobianMatrix};
use crate::problem::{check_primal, BilevelProblem};
use crate::residual::{assemble_residual, Iterate, PenaltySmoothingState, ResidualVector};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::time::Instant;

/// Largest number of step reductions tried before the line search gives up.
pub const MAX_BACKTRACKS: usize = 60;

/// Penalty parameter over iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PenaltySchedule {
    Fixed {
        lambda: f64,
    },
    /// `lambda_k = base * ratio^k`.
    Geometric {
        base: f64,
        ratio: f64,
    },
}

impl PenaltySchedule {
    pub fn fixed(lambda: f64) -> Self {
        Self::Fixed { lambda }
    }

    /// `0.5 * 1.05^k`.
    pub fn varying() -> Self {
        Self::Geometric {
            base: 0.5,
            ratio: 1.05,
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        match *self {
            Self::Fixed { lambda } => lambda,
            Self::Geometric { base, ratio } => base * ratio.powi(k as i32),
        }
    }

    pub fn is_varying(&self) -> bool {
        matches!(self, Self::Geometric { .. })
    }
}

/// Smoothing parameter over iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothingSchedule {
    Fixed {
        mu: f64,
    },
    /// `mu_k = max(base / ratio^k, floor)`.
    Decreasing {
        base: f64,
        ratio: f64,
        floor: f64,
    },
}

impl SmoothingSchedule {
    pub fn value(&self, k: usize) -> f64 {
        match *self {
            Self::Fixed { mu } => mu,
            Self::Decreasing { base, ratio, floor } => (base / ratio.powi(k as i32)).max(floor),
        }
    }
}

impl Default for SmoothingSchedule {
    fn default() -> Self {
        Self::Decreasing {
            base: 1e-3,
            ratio: 1.5,
            floor: 1e-12,
        }
    }
}

/// Replacement stopping rule used by the penalty-parameter studies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct StudyStop {
    /// Stop once `Error_k <= error_at_most`.
    pub error_at_most: Option<f64>,
    /// Only test the target for `k > after_iter`.
    pub after_iter: Option<usize>,
}

/// Which stopping rules are active. The iteration cap always applies.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StoppingProfile {
    /// All six criteria.
    #[default]
    Full,
    /// Criterion 1 only.
    PrimaryOnly,
    /// None of the six criteria; an optional study target instead.
    StudyOverride(StudyStop),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub sigma: f64,
    pub rho: f64,
    pub gamma0: f64,
    pub eta: f64,
    pub alpha_boost: f64,
    pub lambda_schedule: PenaltySchedule,
    pub mu_schedule: SmoothingSchedule,
    pub stopping: StoppingProfile,
    /// Store `z^k` in every `snapshot_stride`-th record; 0 disables snapshots.
    pub snapshot_stride: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            max_iters: 1000,
            sigma: 1e-2,
            rho: 0.5,
            gamma0: 1.0,
            eta: 1.0,
            alpha_boost: 1e4,
            lambda_schedule: PenaltySchedule::varying(),
            mu_schedule: SmoothingSchedule::default(),
            stopping: StoppingProfile::Full,
            snapshot_stride: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(mut self, schedule: PenaltySchedule) -> Self {
        self.lambda_schedule = schedule;
        self
    }

    pub fn with_stopping(mut self, stopping: StoppingProfile) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.epsilon > 0.0) {
            return fail(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.max_iters == 0 {
            return fail("max_iters must be positive".into());
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return fail(format!("sigma must lie in (0, 1), got {}", self.sigma));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return fail(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(self.gamma0 > 0.0 && self.gamma0 <= 1.0) {
            return fail(format!("gamma0 must lie in (0, 1], got {}", self.gamma0));
        }
        if !(1.0..=2.0).contains(&self.eta) {
            return fail(format!("eta must lie in [1, 2], got {}", self.eta));
        }
        if !(self.alpha_boost > 0.0) {
            return fail(format!(
                "alpha_boost must be positive, got {}",
                self.alpha_boost
            ));
        }
        match self.lambda_schedule {
            PenaltySchedule::Fixed { lambda } if !(lambda > 0.0) => {
                return fail(format!("fixed lambda must be positive, got {lambda}"))
            }
            PenaltySchedule::Geometric { base, ratio } if !(base > 0.0 && ratio > 1.0) => {
                return fail(format!(
                    "geometric lambda needs base > 0 and ratio > 1, got {base}, {ratio}"
                ))
            }
            _ => {}
        }
        match self.mu_schedule {
            SmoothingSchedule::Fixed { mu } if !(mu >= 0.0) => {
                return fail(format!("fixed mu must be nonnegative, got {mu}"))
            }
            SmoothingSchedule::Decreasing { base, ratio, floor } if !(base > 0.0 && ratio > 1.0 && floor >= 0.0) => {
                return fail(format!("decreasing mu needs base > 0, ratio > 1, floor >= 0, got {base}, {ratio}, {floor}"))
            }
            _ => {}
        }
        Ok(())
    }
}

/// One row of the run trace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    /// LM parameter of the step taken from `z^k`; absent on the final record.
    pub alpha: Option<f64>,
    /// Smoothed norm at `(lambda_k, mu_k)`.
    pub residual_norm: f64,
    /// Unsmoothed norm at `lambda_k` (the `Error` of the studies).
    pub unsmoothed_residual_norm: f64,
    pub gamma: Option<f64>,
    pub backtracks: Option<usize>,
    #[serde(skip)]
    pub z: Option<Iterate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// 1: residual below epsilon.
    SmallResidual,
    /// 2: step-to-step change below 1e-9.
    Stagnation,
    /// 3: change below 1e-4 after 200 iterations.
    SlowProgress,
    /// 4: residual increased while below 10 after 175 iterations.
    Increase,
    /// 5: residual below 1e-2 after 500 iterations.
    AcceptableResidual,
    /// 6: residual above 1e2 after 200 iterations.
    Divergence,
    MaxIterations,
    LineSearchFailure,
    NonFinite,
    StudyTarget,
}

impl StopReason {
    /// Index of a safeguard criterion, `None` for the other reasons.
    pub fn criterion(&self) -> Option<u8> {
        match self {
            Self::SmallResidual => Some(1),
            Self::Stagnation => Some(2),
            Self::SlowProgress => Some(3),
            Self::Increase => Some(4),
            Self::AcceptableResidual => Some(5),
            Self::Divergence => Some(6),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::SmallResidual => "criterion_1",
            Self::Stagnation => "criterion_2",
            Self::SlowProgress => "criterion_3",
            Self::Increase => "criterion_4",
            Self::AcceptableResidual => "criterion_5",
            Self::Divergence => "criterion_6",
            Self::MaxIterations => "max_iterations",
            Self::LineSearchFailure => "line_search_failure",
            Self::NonFinite => "non_finite",
            Self::StudyTarget => "study_target",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_z: Iterate,
    pub trace: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    pub wall_time: f64,
}

impl RunResult {
    pub fn final_record(&self) -> &IterationRecord {
        self.trace
            .last()
            .expect("trace always holds the starting record")
    }

    /// `Error* = |Res_lambda(z*)|` at the last record.
    pub fn final_error(&self) -> f64 {
        self.final_record().unsmoothed_residual_norm
    }

    /// Stepsize of the last step actually taken.
    pub fn final_stepsize(&self) -> Option<f64> {
        self.trace.iter().rev().find_map(|r| r.gamma)
    }

    pub fn errors(&self) -> Vec<f64> {
        self.trace
            .iter()
            .map(|r| r.unsmoothed_residual_norm)
            .collect()
    }
}

/// Starting point of a run.
#[derive(Debug, Clone, Default)]
pub enum Start {
    /// Problem default start, else `(1_n, 1_m)`.
    #[default]
    Default,
    /// Caller `(x0, y0)`; multipliers derived from `g` and `G`.
    Primal(DVector<f64>, DVector<f64>),
    /// Complete iterate including multipliers.
    Full(Iterate),
}

/// `u0 = max(0.01, -g(x0, y0))`, `v0 = max(0.01, -G(x0, y0))`, `w0 = u0`.
pub fn initialize_iterate(
    problem: &dyn BilevelProblem,
    start_override: Option<(DVector<f64>, DVector<f64>)>,
) -> Result<Iterate> {
    let dims = problem.dims();
    let (x, y) = match start_override.or_else(|| problem.default_start()) {
        Some(start) => start,
        None => (
            DVector::from_element(dims.n, 1.0),
            DVector::from_element(dims.m, 1.0),
        ),
    };
    check_primal(dims, &x, &y)?;
    let u = problem.lower_constraints(&x, &y).map(|g| (-g).max(0.01));
    let v = problem.upper_constraints(&x, &y).map(|c| (-c).max(0.01));
    let w = u.clone();
    Ok(Iterate::new(x, y, u, v, w))
}

fn resolve_start(problem: &dyn BilevelProblem, start: Start) -> Result<Iterate> {
    match start {
        Start::Default => initialize_iterate(problem, None),
        Start::Primal(x, y) => initialize_iterate(problem, Some((x, y))),
        Start::Full(z) => {
            z.check(problem.dims())?;
            Ok(z)
        }
    }
}

/// Solve `(J'J + alpha I) d = -J'r` by LU with partial pivoting.
pub fn lm_direction(
    jacobian: &DMatrix<f64>,
    residual: &DVector<f64>,
    alpha: f64,
) -> Result<DVector<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::Config(format!(
            "LM parameter must be positive, got {alpha}"
        )));
    }
    let cols = jacobian.ncols();
    let normal = jacobian.tr_mul(jacobian) + DMatrix::identity(cols, cols) * alpha;
    let rhs = -jacobian.tr_mul(residual);
    let d = normal
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Singular(format!("normal matrix singular with alpha = {alpha}")))?;
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite direction".into()));
    }
    Ok(d)
}

/// `alpha_k = |r_k|^eta`, or `alpha_boost * |r_k|` right after an increase.
pub fn lm_parameter(
    residual_norm: f64,
    eta: f64,
    previous_norm: Option<f64>,
    alpha_boost: f64,
) -> f64 {
    match previous_norm {
        Some(prev) if residual_norm > prev => alpha_boost * residual_norm,
        _ => residual_norm.powf(eta),
    }
}

/// Accepted step of a backtracking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearch {
    pub gamma: f64,
    pub backtracks: usize,
}

/// Backtrack over `gamma0, rho gamma0, ...` until
/// `merit(gamma) < merit0 + sigma * gamma * slope`.
///
/// Non-finite trial values count as rejections. Returns `None` when
/// [`MAX_BACKTRACKS`] reductions fail.
pub fn backtrack(
    mut merit: impl FnMut(f64) -> Option<f64>,
    merit0: f64,
    slope: f64,
    gamma0: f64,
    rho: f64,
    sigma: f64,
) -> Option<LineSearch> {
    let mut gamma = gamma0;
    for backtracks in 0..=MAX_BACKTRACKS {
        if let Some(value) = merit(gamma) {
            if value.is_finite() && value < merit0 + sigma * gamma * slope {
                return Some(LineSearch { gamma, backtracks });
            }
        }
        gamma *= rho;
    }
    None
}

fn search_along(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    d: &DVector<f64>,
    state: PenaltySmoothingState,
    config: &SolverConfig,
    residual: &ResidualVector,
    jacobian: &JacobianMatrix,
) -> Result<Option<LineSearch>> {
    let dims = problem.dims();
    let base = z.stacked();
    let merit0 = residual.values().norm_squared();
    let slope = 2.0 * jacobian.matrix().tr_mul(residual.values()).dot(d);
    let mut failure = None;
    let found = backtrack(
        |gamma| {
            let trial = Iterate::from_stacked(dims, &(&base + d * gamma)).ok()?;
            match assemble_residual(problem, &trial, state) {
                Ok(r) => Some(r.values().norm_squared()),
                Err(e) => {
                    failure.get_or_insert(e);
                    None
                }
            }
        },
        merit0,
        slope,
        config.gamma0,
        config.rho,
        config.sigma,
    );
    match failure {
        Some(e) if found.is_none() => Err(e),
        _ => Ok(found),
    }
}

/// Armijo backtracking on `|Res_mu(z + gamma d)|^2` with the exact
/// directional derivative `2 (J'r)'d`.
pub fn armijo_backtrack(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    d: &DVector<f64>,
    state: PenaltySmoothingState,
    config: &SolverConfig,
) -> Result<Option<LineSearch>> {
    let residual = assemble_residual(problem, z, state)?;
    let jacobian = assemble_jacobian(problem, z, state)?;
    search_along(problem, z, d, state, config, &residual, &jacobian)
}

fn safeguard_criterion(trace: &[IterationRecord], epsilon: f64) -> Option<StopReason> {
    let cur = trace.last()?;
    let k = cur.k;
    let error = cur.unsmoothed_residual_norm;
    if cur.residual_norm < epsilon || error < epsilon {
        return Some(StopReason::SmallResidual);
    }
    if let Some(prev) = trace.len().checked_sub(2).map(|i| &trace[i]) {
        let decrease = prev.unsmoothed_residual_norm - error;
        if decrease.abs() < 1e-9 {
            return Some(StopReason::Stagnation);
        }
        if decrease.abs() < 1e-4 && k > 200 {
            return Some(StopReason::SlowProgress);
        }
        if decrease < 0.0 && error < 10.0 && k > 175 {
            return Some(StopReason::Increase);
        }
    }
    if error < 1e-2 && k > 500 {
        return Some(StopReason::AcceptableResidual);
    }
    if error > 1e2 && k > 200 {
        return Some(StopReason::Divergence);
    }
    None
}

/// First satisfied stopping rule for the last record, lowest index first.
pub fn check_stop(trace: &[IterationRecord], config: &SolverConfig) -> Option<StopReason> {
    let cur = trace.last()?;
    let reason = match config.stopping {
        StoppingProfile::Full => safeguard_criterion(trace, config.epsilon),
        StoppingProfile::PrimaryOnly => {
            safeguard_criterion(trace, config.epsilon).filter(|r| *r == StopReason::SmallResidual)
        }
        StoppingProfile::StudyOverride(stop) => {
            let past = stop.after_iter.is_none_or(|a| cur.k > a);
            let hit = stop
                .error_at_most
                .is_some_and(|t| cur.unsmoothed_residual_norm <= t);
            (past && hit).then_some(StopReason::StudyTarget)
        }
    };
    reason.or_else(|| (cur.k >= config.max_iters).then_some(StopReason::MaxIterations))
}

/// Run the smoothed LM method from `start`.
pub fn solve(
    problem: &dyn BilevelProblem,
    config: &SolverConfig,
    start: Start,
) -> Result<RunResult> {
    config.validate()?;
    let clock = Instant::now();
    let dims = problem.dims();
    let mut z = resolve_start(problem, start)?;
    let mut trace: Vec<IterationRecord> = Vec::new();

    let stop_reason = loop {
        let k = trace.len();
        let state = PenaltySmoothingState::new(
            config.lambda_schedule.value(k),
            config.mu_schedule.value(k),
        )?;
        let smoothed = assemble_residual(problem, &z, state)?;
        let exact = assemble_residual(problem, &z, state.unsmoothed())?;
        let snapshot = (config.snapshot_stride > 0 && k.is_multiple_of(config.snapshot_stride))
            .then(|| z.clone());
        trace.push(IterationRecord {
            k,
            lambda: state.lambda,
            mu: state.mu,
            alpha: None,
            residual_norm: smoothed.norm(),
            unsmoothed_residual_norm: exact.norm(),
            gamma: None,
            backtracks: None,
            z: snapshot,
        });
        if !smoothed.is_finite() || !exact.is_finite() {
            break StopReason::NonFinite;
        }
        if let Some(reason) = check_stop(&trace, config) {
            break reason;
        }

        let jacobian = assemble_jacobian(problem, &z, state)?;
        if jacobian.matrix().iter().any(|v| !v.is_finite()) {
            break StopReason::NonFinite;
        }
        let previous = k.checked_sub(1).map(|i| trace[i].residual_norm);
        let alpha = lm_parameter(smoothed.norm(), config.eta, previous, config.alpha_boost);
        trace[k].alpha = Some(alpha);
        if !(alpha > 0.0 && alpha.is_finite()) {
            break StopReason::NonFinite;
        }
        let d = match lm_direction(jacobian.matrix(), smoothed.values(), alpha) {
            Ok(d) => d,
            Err(Error::Singular(_)) => break StopReason::NonFinite,
            Err(e) => return Err(e),
        };
        let Some(step) = search_along(problem, &z, &d, state, config, &smoothed, &jacobian)? else {
            break StopReason::LineSearchFailure;
        };
        trace[k].gamma = Some(step.gamma);
        trace[k].backtracks = Some(step.backtracks);
        z = Iterate::from_stacked(dims, &(z.stacked() + d * step.gamma))?;
    };

    Ok(RunResult {
        final_z: z,
        trace,
        stop_reason,
        wall_time: clock.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{get_problem, LAMPARIELLO_SAGRATELLA};
    use nalgebra::{dmatrix, dvector};

    fn record(k: usize, error: f64) -> IterationRecord {
        IterationRecord {
            k,
            lambda: 1.0,
            mu: 0.0,
            alpha: None,
            residual_norm: error,
            unsmoothed_residual_norm: error,
            gamma: None,
            backtracks: None,
            z: None,
        }
    }

    fn pair(k: usize, prev: f64, cur: f64) -> Vec<IterationRecord> {
        vec![record(k - 1, prev), record(k, cur)]
    }

    #[test]
    fn schedules_follow_closed_forms() {
        let lam = PenaltySchedule::varying();
        assert_eq!(lam.value(0), 0.5);
        assert!((lam.value(51) - 6.02).abs() < 5e-3);
        let mu = SmoothingSchedule::default();
        assert_eq!(mu.value(0), 1e-3);
        assert!((mu.value(3) - 1e-3 / 3.375).abs() < 1e-18);
        assert_eq!(mu.value(200), 1e-12);
    }

    #[test]
    fn multipliers_follow_componentwise_max() {
        let prob = get_problem("ConcaveLowerLevel").unwrap();
        let z = initialize_iterate(prob.as_ref(), Some((dvector![1.0], dvector![1.0]))).unwrap();
        // g(1, 1) = (0, -2), G(1) = -1.
        assert_eq!(z.u, dvector![0.01, 2.0]);
        assert_eq!(z.w, z.u);
        assert_eq!(z.v, dvector![1.0]);
        let z = initialize_iterate(prob.as_ref(), Some((dvector![0.0], dvector![-0.5]))).unwrap();
        assert_eq!(z.x, dvector![0.0]);
        // g(0, -0.5) = (-1.5, -0.5).
        assert_eq!(z.u, dvector![1.5, 0.5]);
        let empty = get_problem("QuadraticTracking").unwrap();
        assert_eq!(initialize_iterate(empty.as_ref(), None).unwrap().v.len(), 0);
    }

    #[test]
    fn override_dimension_is_checked() {
        let prob = get_problem(LAMPARIELLO_SAGRATELLA).unwrap();
        assert!(initialize_iterate(prob.as_ref(), Some((dvector![1.0], dvector![1.0]))).is_err());
    }

    #[test]
    fn lm_direction_identity_case() {
        let d = lm_direction(&DMatrix::identity(3, 3), &dvector![1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(d, dvector![-0.5, 0.0, 0.0]);
        let j = dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0];
        assert_eq!(
            lm_direction(&j, &DVector::zeros(3), 0.7).unwrap(),
            DVector::zeros(2)
        );
    }

    #[test]
    fn lm_direction_approaches_steepest_descent() {
        let j = dmatrix![1.0, 2.0; 3.0, 4.0; 5.0, 6.0];
        let r = dvector![0.3, -1.0, 2.0];
        let alpha = 1e8;
        let d = lm_direction(&j, &r, alpha).unwrap();
        let sd = -j.tr_mul(&r) / alpha;
        assert!((&d - &sd).norm() <= 1e-6 * sd.norm());
    }

    #[test]
    fn lm_direction_solves_normal_equations() {
        let j = dmatrix![1.0, 2.0, 0.5; 3.0, 4.0, -1.0; 5.0, 6.0, 2.0; 0.0, 1.0, 1.0];
        let r = dvector![0.3, -1.0, 2.0, 0.7];
        let d = lm_direction(&j, &r, 0.1).unwrap();
        let lhs = (j.tr_mul(&j) + DMatrix::identity(3, 3) * 0.1) * &d;
        let rhs = -j.tr_mul(&r);
        assert!((lhs - &rhs).norm() <= 1e-10 * rhs.norm());
    }

    #[test]
    fn lm_parameter_rules() {
        assert_eq!(lm_parameter(4.0, 1.0, Some(5.0), 1e4), 4.0);
        assert_eq!(lm_parameter(4.0, 2.0, None, 1e4), 16.0);
        assert_eq!(lm_parameter(0.3, 1.0, Some(0.2), 1e4), 3000.0);
    }

    #[test]
    fn full_step_accepted_on_identity_residual() {
        // r(z) = z at z = 1 with alpha = 1 gives d = -0.5.
        let d = lm_direction(&dmatrix![1.0], &dvector![1.0], 1.0).unwrap();
        assert_eq!(d[0], -0.5);
        let slope = 2.0 * 1.0 * d[0];
        let ls = backtrack(
            |g| Some((1.0 + g * d[0]).powi(2)),
            1.0,
            slope,
            1.0,
            0.5,
            1e-2,
        )
        .unwrap();
        assert_eq!(
            ls,
            LineSearch {
                gamma: 1.0,
                backtracks: 0
            }
        );
    }

    #[test]
    fn overshooting_step_is_shortened() {
        // r(z) = (atan z1, atan z2) from (2, 2): the Gauss-Newton step jumps
        // far past the root and increases |r|.
        let z = dvector![2.0, 2.0];
        let r = z.map(f64::atan);
        let j = DMatrix::from_diagonal(&z.map(|t| 1.0 / (1.0 + t * t)));
        let d = lm_direction(&j, &r, 1e-8).unwrap();
        let slope = 2.0 * j.tr_mul(&r).dot(&d);
        assert!(slope < 0.0);
        let merit = |g: f64| Some((&z + &d * g).map(f64::atan).norm_squared());
        assert!(merit(1.0).unwrap() > r.norm_squared());
        let ls = backtrack(merit, r.norm_squared(), slope, 1.0, 0.5, 1e-2).unwrap();
        assert!(ls.backtracks >= 1);
        assert!((ls.gamma - 0.5f64.powi(ls.backtracks as i32)).abs() < 1e-15);
    }

    #[test]
    fn ascent_direction_fails_after_cap() {
        let ls = backtrack(|g| Some(1.0 + g), 1.0, 1.0, 1.0, 0.5, 1e-2);
        assert!(ls.is_none());
    }

    #[test]
    fn stop_on_small_residual() {
        let cfg = SolverConfig::default();
        let mut r = record(0, 1.0);
        r.residual_norm = 9e-6;
        assert_eq!(check_stop(&[r], &cfg), Some(StopReason::SmallResidual));
    }

    #[test]
    fn stop_rules_by_example() {
        let cfg = SolverConfig::default();
        assert_eq!(
            check_stop(&pair(201, 5.00010, 5.00002), &cfg),
            Some(StopReason::SlowProgress)
        );
        assert_eq!(
            check_stop(&[record(201, 150.0)], &cfg),
            Some(StopReason::Divergence)
        );
        assert_eq!(check_stop(&pair(100, 1.0, 0.5), &cfg), None);
    }

    #[test]
    fn primary_only_ignores_safeguards() {
        let cfg = SolverConfig {
            stopping: StoppingProfile::PrimaryOnly,
            ..Default::default()
        };
        assert_eq!(check_stop(&[record(201, 150.0)], &cfg), None);
        assert_eq!(
            check_stop(&[record(3, 1e-6)], &cfg),
            Some(StopReason::SmallResidual)
        );
    }

    #[test]
    fn study_override_respects_iteration_floor() {
        let stop = StudyStop {
            error_at_most: Some(0.1),
            after_iter: Some(50),
        };
        let cfg = SolverConfig {
            stopping: StoppingProfile::StudyOverride(stop),
            ..Default::default()
        };
        assert_eq!(check_stop(&[record(50, 0.05)], &cfg), None);
        assert_eq!(
            check_stop(&[record(51, 0.05)], &cfg),
            Some(StopReason::StudyTarget)
        );
        assert_eq!(
            check_stop(&[record(51, 1e-9)], &cfg),
            Some(StopReason::StudyTarget)
        );
        assert_eq!(
            check_stop(&[record(1000, 5.0)], &cfg),
            Some(StopReason::MaxIterations)
        );
    }

    #[test]
    fn config_ranges_are_enforced() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig {
            eta: 2.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            sigma: 1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(SolverConfig {
            gamma0: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        let bad = SolverConfig::default().with_lambda(PenaltySchedule::fixed(-1.0));
        assert!(bad.validate().is_err());
    }

    #[test]
    fn solution_start_stops_immediately() {
        let prob = get_problem(LAMPARIELLO_SAGRATELLA).unwrap();
        let z = Iterate::new(
            dvector![0.5],
            dvector![0.0, 0.5],
            dvector![1.0, 0.01, 0.0],
            dvector![0.0],
            dvector![0.0, 1.0, 0.0],
        );
        let cfg = SolverConfig::default().with_lambda(PenaltySchedule::fixed(1e-2));
        let run = solve(prob.as_ref(), &cfg, Start::Full(z)).unwrap();
        assert_eq!(run.stop_reason, StopReason::SmallResidual);
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.final_stepsize(), None);
    }

    #[test]
    fn accepted_steps_satisfy_armijo() {
        let prob = get_problem("CoupledProjection").unwrap();
        let cfg = SolverConfig {
            lambda_schedule: PenaltySchedule::fixed(1.0),
            snapshot_stride: 1,
            ..Default::default()
        };
        let run = solve(prob.as_ref(), &cfg, Start::Default).unwrap();
        for pair in run.trace.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (Some(za), Some(zb), Some(gamma)) = (a.z.as_ref(), b.z.as_ref(), a.gamma) else {
                continue;
            };
            let state = PenaltySmoothingState::new(a.lambda, a.mu).unwrap();
            let r = assemble_residual(prob.as_ref(), za, state).unwrap();
            let rn = assemble_residual(prob.as_ref(), zb, state).unwrap();
            let j = assemble_jacobian(prob.as_ref(), za, state).unwrap();
            let d = (zb.stacked() - za.stacked()) / gamma;
            let slope = 2.0 * j.matrix().tr_mul(r.values()).dot(&d);
            assert!(slope < 0.0);
            assert!(
                rn.values().norm_squared()
                    < r.values().norm_squared() + cfg.sigma * gamma * slope + 1e-14
            );
        }
    }

    #[test]
    fn normal_matrix_eigenvalues_bounded_by_alpha() {
        let prob = get_problem("AllendeStill2013").unwrap();
        let z = initialize_iterate(prob.as_ref(), None).unwrap();
        let state = PenaltySmoothingState::new(1.0, 1e-3).unwrap();
        let j = assemble_jacobian(prob.as_ref(), &z, state).unwrap();
        let alpha = 0.37;
        let n = j.matrix().ncols();
        let normal = j.matrix().tr_mul(j.matrix()) + DMatrix::identity(n, n) * alpha;
        let min_eig = normal.symmetric_eigenvalues().min();
        assert!(min_eig >= alpha * (1.0 - 1e-12));
    }

    #[test]
    fn runs_are_bit_identical() {
        let prob = get_problem("ParabolicBoundary").unwrap();
        let cfg = SolverConfig::default();
        let a = solve(prob.as_ref(), &cfg, Start::Default).unwrap();
        let b = solve(prob.as_ref(), &cfg, Start::Default).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.stop_reason, b.stop_reason);
        assert_eq!(a.final_z, b.final_z);
    }

    #[test]
    fn gamma_matches_backtrack_count() {
        let prob = get_problem("AllendeStill2013").unwrap();
        let run = solve(prob.as_ref(), &SolverConfig::default(), Start::Default).unwrap();
        for r in &run.trace {
            if let (Some(g), Some(t)) = (r.gamma, r.backtracks) {
                assert_eq!(g, 0.5f64.powi(t as i32));
            }
        }
    }
}
