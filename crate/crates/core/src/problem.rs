//! Bilevel problem abstraction.
//!
//! A problem is the data of
//!
//! ```text
//! min_{x,y} F(x,y)  s.t.  G(x,y) <= 0,  y in argmin_y { f(x,y) : g(x,y) <= 0 }
//! ```
//!
//! with `x` in R^n, `y` in R^m, `g` in R^p and `G` in R^q. Every evaluator that
//! differentiates "over (x, y)" uses the stacked ordering `(x, y)` for its
//! columns, so a Jacobian of `g` has shape `p x (n + m)`.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

/// Dimensions `(n, m, p, q)` of a bilevel program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub q: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize, p: usize, q: usize) -> Self {
        Self { n, m, p, q }
    }

    /// Number of primal variables `n + m`.
    pub fn primal(&self) -> usize {
        self.n + self.m
    }

    /// Length of the stacked iterate `(x, y, u, v, w)`.
    pub fn variables(&self) -> usize {
        self.n + self.m + 2 * self.p + self.q
    }

    /// Length of the stacked residual; exceeds [`Dims::variables`] by `m`.
    pub fn equations(&self) -> usize {
        self.n + 2 * self.m + 2 * self.p + self.q
    }
}

/// Best known solution of a problem, with the literature source it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnownSolution {
    pub x_star: Vec<f64>,
    pub y_star: Vec<f64>,
    /// Best known upper-level objective value.
    pub upper_value: f64,
    /// Known lower-level optimal value.
    pub lower_value: f64,
    pub source: String,
}

/// How lower-level feasibility of a computed point is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityClass {
    /// Lower level convex in `y`: stationarity of the lower level certifies
    /// the value-function constraint.
    ConvexLowerLevel,
    /// Anything else: compare the lower-level value against the known one.
    CheckByError,
}

/// A bilevel program with hand-coded first and second derivatives.
///
/// Implementations must be immutable; the solver shares them across threads.
pub trait BilevelProblem: Send + Sync {
    fn name(&self) -> &str;
    fn dims(&self) -> Dims;

    /// `F(x, y)`.
    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64;
    /// `grad F` over `(x, y)`, length `n + m`.
    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
    /// Hessian of `F` over `(x, y)`.
    fn upper_hessian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64>;

    /// `f(x, y)`.
    fn lower_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64;
    /// `grad_y f`, length `m`.
    fn lower_gradient_y(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
    /// Derivative of `grad_y f` over `(x, y)`, shape `m x (n + m)`.
    fn lower_gradient_y_jacobian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64>;

    /// `G(x, y)`, length `q`.
    fn upper_constraints(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
    /// Jacobian of `G`, shape `q x (n + m)`.
    fn upper_constraint_jacobian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64>;
    /// Hessian of `G_j` over `(x, y)`.
    fn upper_constraint_hessian(
        &self,
        j: usize,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> DMatrix<f64>;

    /// `g(x, y)`, length `p`.
    fn lower_constraints(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
    /// Jacobian of `g`, shape `p x (n + m)`.
    fn lower_constraint_jacobian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64>;
    /// Hessian of `g_i` over `(x, y)`.
    fn lower_constraint_hessian(
        &self,
        i: usize,
        x: &DVector<f64>,
        y: &DVector<f64>,
    ) -> DMatrix<f64>;

    fn known_solution(&self) -> Option<&KnownSolution> {
        None
    }

    /// Problem-specific `(x0, y0)` replacing the all-ones default.
    fn default_start(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        None
    }

    /// Hand annotation used by the feasibility check; `None` means unannotated.
    fn feasibility_class(&self) -> Option<FeasibilityClass>;

    /// True for instances with a linear lower level and `G` independent of `y`.
    fn has_linear_lower_level(&self) -> bool {
        false
    }
}

/// Check `(x, y)` against the problem's dimensions.
pub fn check_primal(dims: Dims, x: &DVector<f64>, y: &DVector<f64>) -> Result<()> {
    if x.len() != dims.n {
        return Err(Error::Dimension {
            what: "x",
            expected: dims.n,
            got: x.len(),
        });
    }
    if y.len() != dims.m {
        return Err(Error::Dimension {
            what: "y",
            expected: dims.m,
            got: y.len(),
        });
    }
    Ok(())
}

/// Upper-level data whose constraints depend on `x` only.
pub trait UpperLevel: Send + Sync {
    fn objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64;
    fn gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64>;
    fn hessian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64>;
    fn constraint_count(&self) -> usize;
    /// `G(x)`.
    fn constraints(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Jacobian of `G` over `x` only, shape `q x n`.
    fn constraint_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Hessian of `G_j` over `x` only.
    fn constraint_hessian(&self, j: usize, x: &DVector<f64>) -> DMatrix<f64>;
}

/// `F(z) = 0.5 z'Hz + c'z + c0` over `z = (x, y)`, with affine `G(x) = Mx + b`.
#[derive(Debug, Clone)]
pub struct QuadraticUpperLevel {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
    pub constraint_matrix: DMatrix<f64>,
    pub constraint_offset: DVector<f64>,
}

impl QuadraticUpperLevel {
    fn stack(x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).copied())
    }
}

impl UpperLevel for QuadraticUpperLevel {
    fn objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let z = Self::stack(x, y);
        0.5 * z.dot(&(&self.hessian * &z)) + self.linear.dot(&z) + self.constant
    }

    fn gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let z = Self::stack(x, y);
        &self.hessian * z + &self.linear
    }

    fn hessian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        self.hessian.clone()
    }

    fn constraint_count(&self) -> usize {
        self.constraint_offset.len()
    }

    fn constraints(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.constraint_matrix * x + &self.constraint_offset
    }

    fn constraint_jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.constraint_matrix.clone()
    }

    fn constraint_hessian(&self, _j: usize, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// Affine map `x -> Mx + b` from R^n to R^p.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub matrix: DMatrix<f64>,
    pub offset: DVector<f64>,
}

impl AffineMap {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Self {
        Self { matrix, offset }
    }

    pub fn zero(p: usize, n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(p, n),
            offset: DVector::zeros(p),
        }
    }
}

/// Bilevel program with lower level `min_y { c'y : A(x) + By <= d }` and an
/// upper level whose constraints do not involve `y`.
///
/// Problems of this shape are partially calm at every local solution, which
/// makes them the reference class for the penalty-parameter experiments.
pub struct LinearLowerLevel {
    name: String,
    n: usize,
    c: DVector<f64>,
    d: DVector<f64>,
    b: DMatrix<f64>,
    a: AffineMap,
    upper: Box<dyn UpperLevel>,
    known: Option<KnownSolution>,
    start: Option<(DVector<f64>, DVector<f64>)>,
}

/// Build a [`LinearLowerLevel`] problem, validating every dimension.
pub fn linear_lower_level_problem(
    name: impl Into<String>,
    c: DVector<f64>,
    d: DVector<f64>,
    b: DMatrix<f64>,
    a: AffineMap,
    upper: Box<dyn UpperLevel>,
) -> Result<LinearLowerLevel> {
    let m = c.len();
    let p = d.len();
    let n = a.matrix.ncols();
    if b.nrows() != p {
        return Err(Error::Dimension {
            what: "B rows",
            expected: p,
            got: b.nrows(),
        });
    }
    if b.ncols() != m {
        return Err(Error::Dimension {
            what: "B columns",
            expected: m,
            got: b.ncols(),
        });
    }
    if a.matrix.nrows() != p {
        return Err(Error::Dimension {
            what: "A rows",
            expected: p,
            got: a.matrix.nrows(),
        });
    }
    if a.offset.len() != p {
        return Err(Error::Dimension {
            what: "A offset",
            expected: p,
            got: a.offset.len(),
        });
    }
    let probe_x = DVector::zeros(n);
    let probe_y = DVector::zeros(m);
    let grad_len = upper.gradient(&probe_x, &probe_y).len();
    if grad_len != n + m {
        return Err(Error::Dimension {
            what: "upper gradient",
            expected: n + m,
            got: grad_len,
        });
    }
    let g_len = upper.constraints(&probe_x).len();
    if g_len != upper.constraint_count() {
        return Err(Error::Dimension {
            what: "upper constraints",
            expected: upper.constraint_count(),
            got: g_len,
        });
    }
    Ok(LinearLowerLevel {
        name: name.into(),
        n,
        c,
        d,
        b,
        a,
        upper,
        known: None,
        start: None,
    })
}

impl LinearLowerLevel {
    pub fn with_known_solution(mut self, known: KnownSolution) -> Self {
        self.known = Some(known);
        self
    }

    pub fn with_default_start(mut self, x0: DVector<f64>, y0: DVector<f64>) -> Self {
        self.start = Some((x0, y0));
        self
    }
}

impl BilevelProblem for LinearLowerLevel {
    fn name(&self) -> &str {
        &self.name
    }

    fn dims(&self) -> Dims {
        Dims::new(
            self.n,
            self.c.len(),
            self.d.len(),
            self.upper.constraint_count(),
        )
    }

    fn upper_objective(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.upper.objective(x, y)
    }

    fn upper_gradient(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.upper.gradient(x, y)
    }

    fn upper_hessian(&self, x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
        self.upper.hessian(x, y)
    }

    fn lower_objective(&self, _x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.c.dot(y)
    }

    fn lower_gradient_y(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        self.c.clone()
    }

    fn lower_gradient_y_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::zeros(self.c.len(), self.n + self.c.len())
    }

    fn upper_constraints(&self, x: &DVector<f64>, _y: &DVector<f64>) -> DVector<f64> {
        self.upper.constraints(x)
    }

    fn upper_constraint_jacobian(&self, x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        let jx = self.upper.constraint_jacobian(x);
        let mut jac = DMatrix::zeros(jx.nrows(), self.n + self.c.len());
        jac.view_mut((0, 0), (jx.nrows(), self.n)).copy_from(&jx);
        jac
    }

    fn upper_constraint_hessian(
        &self,
        j: usize,
        x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        let hx = self.upper.constraint_hessian(j, x);
        let k = self.n + self.c.len();
        let mut hess = DMatrix::zeros(k, k);
        hess.view_mut((0, 0), (self.n, self.n)).copy_from(&hx);
        hess
    }

    fn lower_constraints(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        &self.a.matrix * x + &self.a.offset + &self.b * y - &self.d
    }

    fn lower_constraint_jacobian(&self, _x: &DVector<f64>, _y: &DVector<f64>) -> DMatrix<f64> {
        let p = self.d.len();
        let mut jac = DMatrix::zeros(p, self.n + self.c.len());
        jac.view_mut((0, 0), (p, self.n)).copy_from(&self.a.matrix);
        jac.view_mut((0, self.n), (p, self.c.len()))
            .copy_from(&self.b);
        jac
    }

    fn lower_constraint_hessian(
        &self,
        _i: usize,
        _x: &DVector<f64>,
        _y: &DVector<f64>,
    ) -> DMatrix<f64> {
        let k = self.n + self.c.len();
        DMatrix::zeros(k, k)
    }

    fn known_solution(&self) -> Option<&KnownSolution> {
        self.known.as_ref()
    }

    fn default_start(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        self.start.clone()
    }

    fn feasibility_class(&self) -> Option<FeasibilityClass> {
        Some(FeasibilityClass::ConvexLowerLevel)
    }

    fn has_linear_lower_level(&self) -> bool {
        true
    }
}
