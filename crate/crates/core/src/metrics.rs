//! Evaluation quantities computed from a finished run.

use crate::error::{Error, Result};
use crate::problem::{BilevelProblem, FeasibilityClass};
use crate::residual::{assemble_residual, PenaltySmoothingState, ResidualBlock};
use crate::solver::{RunResult, StopReason};
use serde::Serialize;

/// Absolute lower-level relative error accepted for `check_by_error` problems.
pub const LOWER_ERROR_TOLERANCE: f64 = 0.2;

/// `(F_A - F_K) / (1 + |F_K|)`.
pub fn upper_level_relative_error(f_a: f64, f_k: f64) -> f64 {
    (f_a - f_k) / (1.0 + f_k.abs())
}

/// `(f_A - f_K) / (1 + |f_K|)`.
pub fn lower_level_relative_error(f_a: f64, f_k: f64) -> f64 {
    (f_a - f_k) / (1.0 + f_k.abs())
}

/// Why no EOC value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EocStatus {
    Computed,
    TooFewRecords,
    /// A norm was exactly zero.
    ExactRoot,
    /// A norm was at least one, so the log-ratio is not a contraction order.
    NotContracting,
}

/// EOC over the last three norms `e_{K-2}, e_{K-1}, e_K`:
/// `max(ln e_{K-1} / ln e_{K-2}, ln e_K / ln e_{K-1})`.
pub fn experimental_order_of_convergence(norms: &[f64]) -> (Option<f64>, EocStatus) {
    let [a, b, c] = match norms {
        [.., a, b, c] => [*a, *b, *c],
        _ => return (None, EocStatus::TooFewRecords),
    };
    if a == 0.0 || b == 0.0 || c == 0.0 {
        return (None, EocStatus::ExactRoot);
    }
    if !(a < 1.0 && b < 1.0 && c < 1.0) {
        return (None, EocStatus::NotContracting);
    }
    let eoc = (b.ln() / a.ln()).max(c.ln() / b.ln());
    (Some(eoc), EocStatus::Computed)
}

/// Hand annotation of the problem; unannotated problems are an error.
pub fn feasibility_class(problem: &dyn BilevelProblem) -> Result<FeasibilityClass> {
    problem
        .feasibility_class()
        .ok_or_else(|| Error::MissingAnnotation(problem.name().to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub upper_rel_error: Option<f64>,
    pub lower_rel_error: Option<f64>,
    pub eoc: Option<f64>,
    pub eoc_status: EocStatus,
    /// Stepsize of the last accepted step; absent when no step was taken.
    pub final_stepsize: Option<f64>,
    /// Unsmoothed residual norm at the final iterate.
    pub final_error: f64,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub feasibility_class: FeasibilityClass,
    /// Absent for `check_by_error` problems without a known solution.
    pub lower_level_feasible: Option<bool>,
    pub upper_value: f64,
    pub lower_value: f64,
    /// Excluded from serialized reports unless timing is requested.
    #[serde(skip)]
    pub cpu_seconds: f64,
}

/// Metrics of `run`, with `epsilon` as the feasibility tolerance for the
/// lower-level stationarity and complementarity blocks.
pub fn evaluate(
    problem: &dyn BilevelProblem,
    run: &RunResult,
    epsilon: f64,
) -> Result<MetricsReport> {
    let class = feasibility_class(problem)?;
    let z = &run.final_z;
    let last = run.final_record();
    let upper_value = problem.upper_objective(&z.x, &z.y);
    let lower_value = problem.lower_objective(&z.x, &z.y);
    let known = problem.known_solution();
    let upper_rel_error = known.map(|k| upper_level_relative_error(upper_value, k.upper_value));
    let lower_rel_error = known.map(|k| lower_level_relative_error(lower_value, k.lower_value));

    let lower_level_feasible = match class {
        FeasibilityClass::ConvexLowerLevel => {
            let state = PenaltySmoothingState::new(last.lambda, 0.0)?;
            let r = assemble_residual(problem, z, state)?;
            let stationarity = r.block(ResidualBlock::LowerStationarity).norm();
            let complementarity = r.block(ResidualBlock::LowerComplementarityW).norm();
            Some(stationarity < epsilon && complementarity < epsilon)
        }
        FeasibilityClass::CheckByError => lower_rel_error.map(|e| e.abs() <= LOWER_ERROR_TOLERANCE),
    };

    let (eoc, eoc_status) = experimental_order_of_convergence(&run.errors());
    Ok(MetricsReport {
        upper_rel_error,
        lower_rel_error,
        eoc,
        eoc_status,
        final_stepsize: run.final_stepsize(),
        final_error: run.final_error(),
        iterations: last.k,
        stop_reason: run.stop_reason,
        feasibility_class: class,
        lower_level_feasible,
        upper_value,
        lower_value,
        cpu_seconds: run.wall_time,
    })
}
