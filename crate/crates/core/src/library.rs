//! Shipped desk-scale test set and the name registry over it.
//!
//! Every problem carries analytic derivatives. Known solutions of the
//! analytically derived instances were obtained by reducing the bilevel
//! program to a one-dimensional problem in closed form; the derivation is
//! summarized next to each constructor.

use crate::error::{Error, Result};
use crate::problem::{
    linear_lower_level_problem, AffineMap, BilevelProblem, Dims, FeasibilityClass, KnownSolution,
    LinearLowerLevel, QuadraticUpperLevel,
};
use nalgebra::{dmatrix, dvector, DMatrix, DVector};
use serde::Serialize;
use std::sync::{Arc, OnceLock};

pub const LAMPARIELLO_SAGRATELLA: &str = "LampariellloSagratella2017Ex33";
pub const ALLENDE_STILL: &str = "AllendeStill2013";

/// Registry row emitted by the CLI `list` command.
#[derive(Debug, Clone, Serialize)]
pub struct ProblemListing {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub has_known_solution: bool,
}

fn registry() -> &'static [Arc<dyn BilevelProblem>] {
    static REGISTRY: OnceLock<Vec<Arc<dyn BilevelProblem>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            Arc::new(lampariello_sagratella()),
            Arc::new(AllendeStill),
            Arc::new(calm_linear_abs()),
            Arc::new(calm_linear_split()),
            Arc::new(calm_linear_knapsack()),
            Arc::new(QuadraticTracking),
            Arc::new(ParabolicBoundary),
            Arc::new(ConcaveLowerLevel),
            Arc::new(CoupledProjection),
        ]
    })
}

/// Every shipped problem, in registry order.
pub fn all_problems() -> Vec<Arc<dyn BilevelProblem>> {
    registry().to_vec()
}

pub fn problem_names() -> Vec<&'static str> {
    registry().iter().map(|p| p.name()).collect()
}

/// Look up a shipped problem by name.
pub fn get_problem(name: &str) -> Result<Arc<dyn BilevelProblem>> {
    registry()
        .iter()
        .find(|p| p.name() == name)
        .cloned()
        .ok_or_else(|| Error::UnknownProblem {
            name: name.to_string(),
            available: problem_names().join(", "),
        })
}

pub fn listing() -> Vec<ProblemListing> {
    registry()
        .iter()
        .map(|p| {
            let d = p.dims();
            ProblemListing {
                name: p.name().to_string(),
                n: d.n,
                m: d.m,
                p: d.p,
                q: d.q,
                has_known_solution: p.known_solution().is_some(),
            }
        })
        .collect()
}

fn known(x: &[f64], y: &[f64], upper: f64, lower: f64, source: &str) -> KnownSolution {
    KnownSolution {
        x_star: x.to_vec(),
        y_star: y.to_vec(),
        upper_value: upper,
        lower_value: lower,
        source: source.to_string(),
    }
}

/// F = x^2 + (y1+y2)^2, G = -x + 0.5, f = y1, g = (-x-y1-y2+1, -y1, -y2).
pub fn lampariello_sagratella() -> LinearLowerLevel {
    let upper = QuadraticUpperLevel {
        hessian: dmatrix![2.0, 0.0, 0.0; 0.0, 2.0, 2.0; 0.0, 2.0, 2.0],
        linear: DVector::zeros(3),
        constant: 0.0,
        constraint_matrix: dmatrix![-1.0],
        constraint_offset: dvector![0.5],
    };
    linear_lower_level_problem(
        LAMPARIELLO_SAGRATELLA,
        dvector![1.0, 0.0],
        DVector::zeros(3),
        dmatrix![-1.0, -1.0; -1.0, 0.0; 0.0, -1.0],
        AffineMap::new(dmatrix![-1.0; 0.0; 0.0], dvector![1.0, 0.0, 0.0]),
        Box::new(upper),
    )
    .expect("static dimensions")
    .with_known_solution(known(
        &[0.5],
        &[0.0, 0.5],
        0.5,
        0.0,
        "BOLIB LamparielloSagratella2017Ex33",
    ))
}

/// f = y'y - 2x'y with y in [0.5, 1.5]^2 gives y_i = clip(x_i), so F reduces to
/// a separable function of x minimized at x_i = 0.5.
pub struct AllendeStill;

impl BilevelProblem for AllendeStill {
    fn name(&self) -> &str {
        ALLENDE_STILL
    }

    fn dims(&self) -> Dims {
        Dims::new(2, 2, 2, 5)
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x[0] * x[0] - 2.0 * x[0] + x[1] * x[1] - 2.0 * x[1] + y[0] * y[0] + y[1] * y[1]
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * x[0] - 2.0, 2.0 * x[1] - 2.0, 2.0 * y[0], 2.0 * y[1]]
    }

    fn upper_hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(4, 4) * 2.0
    }

    fn lower_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        y[0] * y[0] - 2.0 * x[0] * y[0] + y[1] * y[1] - 2.0 * x[1] * y[1]
    }

    fn lower_gradient_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * y[0] - 2.0 * x[0], 2.0 * y[1] - 2.0 * x[1]]
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![-2.0, 0.0, 2.0, 0.0; 0.0, -2.0, 0.0, 2.0]
    }

    fn upper_constraints(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![-x[0], -x[1], -y[0], -y[1], x[0] - 2.0]
    }

    fn upper_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![
            -1.0, 0.0, 0.0, 0.0;
            0.0, -1.0, 0.0, 0.0;
            0.0, 0.0, -1.0, 0.0;
            0.0, 0.0, 0.0, -1.0;
            1.0, 0.0, 0.0, 0.0
        ]
    }

    fn upper_constraint_hessian(
        &self,
        _j: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(4, 4)
    }

    fn lower_constraints(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![(y[0] - 1.0).powi(2) - 0.25, (y[1] - 1.0).powi(2) - 0.25]
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![
            0.0, 0.0, 2.0 * (y[0] - 1.0), 0.0;
            0.0, 0.0, 0.0, 2.0 * (y[1] - 1.0)
        ]
    }

    fn lower_constraint_hessian(
        &self,
        i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(4, 4);
        h[(2 + i, 2 + i)] = 2.0;
        h
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        static KNOWN: OnceLock<KnownSolution> = OnceLock::new();
        Some(KNOWN.get_or_init(|| {
            known(
                &[0.5, 0.5],
                &[0.5, 0.5],
                -1.0,
                -0.5,
                "BOLIB AllendeStill2013",
            )
        }))
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::ConvexLowerLevel)
    }
}

/// Lower level `min_y { y : y >= x, y >= -x }`, so y = |x|; with
/// F = (x-1)^2 + (y-2)^2 the optimum is x = y = 1.5. The upper stationarity
/// rows admit a root only for lambda >= 1.
pub fn calm_linear_abs() -> LinearLowerLevel {
    let upper = QuadraticUpperLevel {
        hessian: DMatrix::identity(2, 2) * 2.0,
        linear: dvector![-2.0, -4.0],
        constant: 5.0,
        constraint_matrix: dmatrix![1.0],
        constraint_offset: dvector![-3.0],
    };
    linear_lower_level_problem(
        "CalmLinearAbs",
        dvector![1.0],
        DVector::zeros(2),
        dmatrix![-1.0; -1.0],
        AffineMap::new(dmatrix![1.0; -1.0], DVector::zeros(2)),
        Box::new(upper),
    )
    .expect("static dimensions")
    .with_known_solution(known(&[1.5], &[1.5], 0.5, 1.5, "closed-form derivation"))
}

/// Lower level `min_y { y1 + y2 : y >= x, y >= 0 }`, so y_i = max(x_i, 0);
/// F = (x1-2)^2 + (x2+1)^2 + |y|^2 is minimized at x = (1, -1), y = (1, 0).
pub fn calm_linear_split() -> LinearLowerLevel {
    let upper = QuadraticUpperLevel {
        hessian: DMatrix::identity(4, 4) * 2.0,
        linear: dvector![-4.0, 2.0, 0.0, 0.0],
        constant: 5.0,
        constraint_matrix: dmatrix![1.0, 0.0; 0.0, -1.0],
        constraint_offset: dvector![-3.0, -3.0],
    };
    linear_lower_level_problem(
        "CalmLinearSplit",
        dvector![1.0, 1.0],
        DVector::zeros(4),
        dmatrix![-1.0, 0.0; 0.0, -1.0; -1.0, 0.0; 0.0, -1.0],
        AffineMap::new(
            dmatrix![1.0, 0.0; 0.0, 1.0; 0.0, 0.0; 0.0, 0.0],
            DVector::zeros(4),
        ),
        Box::new(upper),
    )
    .expect("static dimensions")
    .with_known_solution(known(
        &[1.0, -1.0],
        &[1.0, 0.0],
        2.0,
        1.0,
        "closed-form derivation",
    ))
}

/// Lower level `min_y { -y1 - 2 y2 : y1 + y2 <= 1, y >= 0, y2 <= x }` gives
/// y = (1 - x, x) on [0, 1]; F = x^2 + 2 y1^2 is then minimized at x = 2/3.
/// A root exists for lambda >= 4/3. The default start is moved inside the
/// feasible region since (1, 1, 1) violates y1 + y2 <= 1.
pub fn calm_linear_knapsack() -> LinearLowerLevel {
    let upper = QuadraticUpperLevel {
        hessian: DMatrix::from_diagonal(&dvector![2.0, 4.0, 0.0]),
        linear: DVector::zeros(3),
        constant: 0.0,
        constraint_matrix: dmatrix![-1.0; 1.0],
        constraint_offset: dvector![0.0, -2.0],
    };
    linear_lower_level_problem(
        "CalmLinearKnapsack",
        dvector![-1.0, -2.0],
        dvector![1.0, 0.0, 0.0, 0.0],
        dmatrix![1.0, 1.0; -1.0, 0.0; 0.0, -1.0; 0.0, 1.0],
        AffineMap::new(dmatrix![0.0; 0.0; 0.0; -1.0], DVector::zeros(4)),
        Box::new(upper),
    )
    .expect("static dimensions")
    .with_known_solution(known(
        &[2.0 / 3.0],
        &[1.0 / 3.0, 2.0 / 3.0],
        2.0 / 3.0,
        -5.0 / 3.0,
        "closed-form derivation",
    ))
    .with_default_start(dvector![1.0], dvector![0.25, 0.5])
}

/// Unconstrained at both levels: F = (x-1)^2 + (y-1)^2, f = (y-x)^2.
/// Started away from the all-ones default, which is already the solution.
pub struct QuadraticTracking;

impl BilevelProblem for QuadraticTracking {
    fn name(&self) -> &str {
        "QuadraticTracking"
    }

    fn dims(&self) -> Dims {
        Dims::new(1, 1, 0, 0)
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x[0] - 1.0).powi(2) + (y[0] - 1.0).powi(2)
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * (x[0] - 1.0), 2.0 * (y[0] - 1.0)]
    }

    fn upper_hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(2, 2) * 2.0
    }

    fn lower_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (y[0] - x[0]).powi(2)
    }

    fn lower_gradient_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * (y[0] - x[0])]
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![-2.0, 2.0]
    }

    fn upper_constraints(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(0)
    }

    fn upper_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(0, 2)
    }

    fn upper_constraint_hessian(
        &self,
        _j: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(2, 2)
    }

    fn lower_constraints(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(0)
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(0, 2)
    }

    fn lower_constraint_hessian(
        &self,
        _i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(2, 2)
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        static KNOWN: OnceLock<KnownSolution> = OnceLock::new();
        Some(KNOWN.get_or_init(|| known(&[1.0], &[1.0], 0.0, 0.0, "closed-form derivation")))
    }

    fn default_start(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        Some((dvector![2.0], dvector![0.0]))
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::ConvexLowerLevel)
    }
}

/// Lower level `min_y { -y : y^2 <= x }` gives y = sqrt(x). With
/// x = t^2 the upper objective (x - 4.5)^2 + y^2 becomes
/// (t^2 - 4.5)^2 + t^2, whose stationary points are t = 0 and t = 2; the
/// latter is the minimizer. Roots of the residual need lambda >= 4.
pub struct ParabolicBoundary;

impl BilevelProblem for ParabolicBoundary {
    fn name(&self) -> &str {
        "ParabolicBoundary"
    }

    fn dims(&self) -> Dims {
        Dims::new(1, 1, 1, 1)
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x[0] - 4.5).powi(2) + y[0] * y[0]
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * (x[0] - 4.5), 2.0 * y[0]]
    }

    fn upper_hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(2, 2) * 2.0
    }

    fn lower_objective(&self, _x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        -y[0]
    }

    fn lower_gradient_y(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        dvector![-1.0]
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(1, 2)
    }

    fn upper_constraints(&self, x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        dvector![-x[0]]
    }

    fn upper_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![-1.0, 0.0]
    }

    fn upper_constraint_hessian(
        &self,
        _j: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(2, 2)
    }

    fn lower_constraints(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![y[0] * y[0] - x[0]]
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![-1.0, 2.0 * y[0]]
    }

    fn lower_constraint_hessian(
        &self,
        _i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        dmatrix![0.0, 0.0; 0.0, 2.0]
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        static KNOWN: OnceLock<KnownSolution> = OnceLock::new();
        Some(KNOWN.get_or_init(|| known(&[4.0], &[2.0], 4.25, -2.0, "closed-form derivation")))
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::ConvexLowerLevel)
    }
}

/// Concave lower level `min_y { -(y - x)^2 : -1 <= y <= 1 }` picks the far
/// endpoint, y = -1 for x > 0. F = (x - 0.5)^2 + y^2 gives x = 0.5, y = -1.
/// The near endpoint y = 1 is a spurious lower-level KKT point with the same
/// upper value, so only the lower-level error separates the two.
pub struct ConcaveLowerLevel;

impl BilevelProblem for ConcaveLowerLevel {
    fn name(&self) -> &str {
        "ConcaveLowerLevel"
    }

    fn dims(&self) -> Dims {
        Dims::new(1, 1, 2, 1)
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x[0] - 0.5).powi(2) + y[0] * y[0]
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![2.0 * (x[0] - 0.5), 2.0 * y[0]]
    }

    fn upper_hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(2, 2) * 2.0
    }

    fn lower_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        -(y[0] - x[0]).powi(2)
    }

    fn lower_gradient_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![-2.0 * (y[0] - x[0])]
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![2.0, -2.0]
    }

    fn upper_constraints(&self, x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        dvector![x[0] - 2.0]
    }

    fn upper_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![1.0, 0.0]
    }

    fn upper_constraint_hessian(
        &self,
        _j: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(2, 2)
    }

    fn lower_constraints(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![y[0] - 1.0, -1.0 - y[0]]
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![0.0, 1.0; 0.0, -1.0]
    }

    fn lower_constraint_hessian(
        &self,
        _i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(2, 2)
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        static KNOWN: OnceLock<KnownSolution> = OnceLock::new();
        Some(KNOWN.get_or_init(|| known(&[0.5], &[-1.0], 1.0, -2.25, "closed-form derivation")))
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::CheckByError)
    }
}

/// Lower level projects x onto the halfspace y1 + y2 <= 1. Upper objective
/// |x - 1|^2 + |y - 1|^2 is minimized at x = (1, 1), y = (0.5, 0.5). The
/// all-ones start violates g, so y0 = (0.25, 0.25) is used instead.
pub struct CoupledProjection;

impl BilevelProblem for CoupledProjection {
    fn name(&self) -> &str {
        "CoupledProjection"
    }

    fn dims(&self) -> Dims {
        Dims::new(2, 2, 1, 2)
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.iter().chain(y.iter()).map(|v| (v - 1.0).powi(2)).sum()
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(4, x.iter().chain(y.iter()).map(|v| 2.0 * (v - 1.0)))
    }

    fn upper_hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(4, 4) * 2.0
    }

    fn lower_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (y - x).norm_squared()
    }

    fn lower_gradient_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        (y - x) * 2.0
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![-2.0, 0.0, 2.0, 0.0; 0.0, -2.0, 0.0, 2.0]
    }

    fn upper_constraints(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        -y
    }

    fn upper_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![0.0, 0.0, -1.0, 0.0; 0.0, 0.0, 0.0, -1.0]
    }

    fn upper_constraint_hessian(
        &self,
        _j: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(4, 4)
    }

    fn lower_constraints(&self, _x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        dvector![y[0] + y[1] - 1.0]
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        dmatrix![0.0, 0.0, 1.0, 1.0]
    }

    fn lower_constraint_hessian(
        &self,
        _i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        DMatrix::zeros(4, 4)
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        static KNOWN: OnceLock<KnownSolution> = OnceLock::new();
        Some(
            KNOWN.get_or_init(|| {
                known(&[1.0, 1.0], &[0.5, 0.5], 0.5, 0.5, "closed-form derivation")
            }),
        )
    }

    fn default_start(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        Some((dvector![1.0, 1.0], dvector![0.25, 0.25]))
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::ConvexLowerLevel)
    }
}
