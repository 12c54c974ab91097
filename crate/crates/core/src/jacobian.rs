//! Analytic Jacobian of the smoothed residual, plus validation helpers.
//!
//! Column blocks are `(x, y | u | v | w)` and row blocks follow the residual:
//!
//! ```text
//! [ H_L          grad g'     grad G'   -lambda grad g' ]   (i), (ii)
//! [ D(grad_y l)  0           0          grad_y g'       ]   (iii)
//! [ T grad g     Gamma       0          0               ]   (iv)
//! [ A grad G     0           B          0               ]   (v)
//! [ Th grad g    0           0          K               ]   (vi)
//! ```
//!
//! with `H_L = hess F + sum (u_i - lambda w_i) hess g_i + sum v_j hess G_j`
//! and `D(grad_y l) = D(grad_y f) + sum w_i (y-rows of hess g_i)`.

use crate::error::{Error, Result};
use crate::problem::{BilevelProblem, Dims};
use crate::residual::{assemble_residual, Iterate, PenaltySmoothingState};
use nalgebra::{DMatrix, DVector};

/// Dense Jacobian of shape `(n + 2m + 2p + q) x (n + m + 2p + q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    matrix: DMatrix<f64>,
    dims: Dims,
}

impl JacobianMatrix {
    pub fn from_matrix(dims: Dims, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != dims.equations() {
            return Err(Error::Dimension {
                what: "jacobian rows",
                expected: dims.equations(),
                got: matrix.nrows(),
            });
        }
        if matrix.ncols() != dims.variables() {
            return Err(Error::Dimension {
                what: "jacobian columns",
                expected: dims.variables(),
                got: matrix.ncols(),
            });
        }
        Ok(Self { matrix, dims })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn shape(&self) -> (usize, usize) {
        self.matrix.shape()
    }
}

/// Partial derivatives of the smoothed FB pairing for `k` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct FbDiagonals {
    /// Derivative with respect to the constraint value.
    pub tau: DVector<f64>,
    /// Derivative with respect to the multiplier.
    pub gamma: DVector<f64>,
}

/// `tau_j = cons_j / r_j + 1` and `gamma_j = mult_j / r_j - 1` where
/// `r_j = sqrt(mult_j^2 + cons_j^2 + 2mu)`.
pub fn fb_diagonals(mult: &DVector<f64>, cons: &DVector<f64>, mu: f64) -> Result<FbDiagonals> {
    if mult.len() != cons.len() {
        return Err(Error::Dimension {
            what: "fb pairing",
            expected: mult.len(),
            got: cons.len(),
        });
    }
    let k = mult.len();
    let mut tau = DVector::zeros(k);
    let mut gamma = DVector::zeros(k);
    for j in 0..k {
        let r = (mult[j] * mult[j] + cons[j] * cons[j] + 2.0 * mu).sqrt();
        if r == 0.0 {
            return Err(Error::Kink { index: j });
        }
        tau[j] = cons[j] / r + 1.0;
        gamma[j] = mult[j] / r - 1.0;
    }
    Ok(FbDiagonals { tau, gamma })
}

/// Analytic Jacobian of [`assemble_residual`].
pub fn assemble_jacobian(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    state: PenaltySmoothingState,
) -> Result<JacobianMatrix> {
    let dims = problem.dims();
    z.check(dims)?;
    let Dims { n, m, p, q } = dims;
    let nm = n + m;
    let (x, y) = (&z.x, &z.y);
    let lambda = state.lambda;

    let g = problem.lower_constraints(x, y);
    let big_g = problem.upper_constraints(x, y);
    let jac_g = problem.lower_constraint_jacobian(x, y);
    let jac_big_g = problem.upper_constraint_jacobian(x, y);

    let mut lagrangian_hessian = problem.upper_hessian(x, y);
    let mut lower_block = problem.lower_gradient_y_jacobian(x, y);
    for i in 0..p {
        let hess = problem.lower_constraint_hessian(i, x, y);
        lagrangian_hessian += &hess * (z.u[i] - lambda * z.w[i]);
        lower_block += hess.rows(n, m) * z.w[i];
    }
    for j in 0..q {
        lagrangian_hessian += problem.upper_constraint_hessian(j, x, y) * z.v[j];
    }

    let (col_u, col_v, col_w) = (nm, nm + p, nm + p + q);
    let (row_lower, row_u, row_v, row_w) = (nm, nm + m, nm + m + p, nm + m + p + q);
    let mut jac = DMatrix::zeros(dims.equations(), dims.variables());

    jac.view_mut((0, 0), (nm, nm))
        .copy_from(&lagrangian_hessian);
    jac.view_mut((0, col_u), (nm, p))
        .copy_from(&jac_g.transpose());
    jac.view_mut((0, col_v), (nm, q))
        .copy_from(&jac_big_g.transpose());
    jac.view_mut((0, col_w), (nm, p))
        .copy_from(&(jac_g.transpose() * -lambda));

    jac.view_mut((row_lower, 0), (m, nm))
        .copy_from(&lower_block);
    jac.view_mut((row_lower, col_w), (m, p))
        .copy_from(&jac_g.columns(n, m).transpose());

    let pairings = [
        (row_u, col_u, &z.u, &g, &jac_g),
        (row_v, col_v, &z.v, &big_g, &jac_big_g),
        (row_w, col_w, &z.w, &g, &jac_g),
    ];
    for (row, col, mult, cons, cons_jac) in pairings {
        let diag = fb_diagonals(mult, cons, state.mu)?;
        for j in 0..mult.len() {
            let scaled = cons_jac.row(j) * diag.tau[j];
            jac.view_mut((row + j, 0), (1, nm)).copy_from(&scaled);
            jac[(row + j, col + j)] = diag.gamma[j];
        }
    }
    JacobianMatrix::from_matrix(dims, jac)
}

/// Central-difference approximation of the residual Jacobian.
pub fn finite_difference_jacobian(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    state: PenaltySmoothingState,
    step: f64,
) -> Result<JacobianMatrix> {
    if !(step > 0.0) {
        return Err(Error::Config(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    let dims = problem.dims();
    z.check(dims)?;
    let base = z.stacked();
    let mut jac = DMatrix::zeros(dims.equations(), dims.variables());
    for k in 0..base.len() {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += step;
        minus[k] -= step;
        let rp = assemble_residual(problem, &Iterate::from_stacked(dims, &plus)?, state)?;
        let rm = assemble_residual(problem, &Iterate::from_stacked(dims, &minus)?, state)?;
        let column = (rp.into_values() - rm.into_values()) / (2.0 * step);
        jac.set_column(k, &column);
    }
    JacobianMatrix::from_matrix(dims, jac)
}

/// Numerical rank by Gaussian elimination with complete pivoting.
///
/// A pivot counts when its magnitude exceeds `tol` times the first (largest)
/// pivot.
pub fn column_rank(matrix: &DMatrix<f64>, tol: f64) -> usize {
    let mut a = matrix.clone();
    let (rows, cols) = a.shape();
    let mut rank = 0;
    let mut reference = 0.0;
    for step in 0..rows.min(cols) {
        let mut best = (step, step, 0.0);
        for r in step..rows {
            for c in step..cols {
                let v = a[(r, c)].abs();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if step == 0 {
            reference = best.2;
        }
        if reference == 0.0 || best.2 <= tol * reference {
            break;
        }
        a.swap_rows(step, best.0);
        a.swap_columns(step, best.1);
        let pivot = a[(step, step)];
        for r in (step + 1)..rows {
            let factor = a[(r, step)] / pivot;
            if factor != 0.0 {
                for c in step..cols {
                    a[(r, c)] -= factor * a[(step, c)];
                }
            }
        }
        rank += 1;
    }
    rank
}
