//! Fischer-Burmeister residual of the value-function stationarity system.
//!
//! For `z = (x, y, u, v, w)` the residual stacks six blocks:
//!
//! ```text
//! (i)   grad_x F + grad_x g'(u - lambda w) + grad_x G' v
//! (ii)  grad_y F + grad_y g'(u - lambda w) + grad_y G' v
//! (iii) grad_y f + grad_y g' w
//! (iv)  sqrt(u^2 + g^2 + 2mu) - u + g
//! (v)   sqrt(v^2 + G^2 + 2mu) - v + G
//! (vi)  sqrt(w^2 + g^2 + 2mu) - w + g
//! ```
//!
//! The system has `m` more equations than unknowns.

use crate::error::{Error, Result};
use crate::problem::{check_primal, BilevelProblem, Dims};
use nalgebra::DVector;
use serde::{Serialize, Serializer};

fn as_slice<S: Serializer>(v: &DVector<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_slice().serialize(s)
}

/// Stacked iterate `z = (x, y, u, v, w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Iterate {
    #[serde(serialize_with = "as_slice")]
    pub x: DVector<f64>,
    #[serde(serialize_with = "as_slice")]
    pub y: DVector<f64>,
    /// Multipliers of `g` in the upper-level stationarity rows.
    #[serde(serialize_with = "as_slice")]
    pub u: DVector<f64>,
    /// Multipliers of `G`.
    #[serde(serialize_with = "as_slice")]
    pub v: DVector<f64>,
    /// Multipliers of `g` in the lower-level stationarity row.
    #[serde(serialize_with = "as_slice")]
    pub w: DVector<f64>,
}

impl Iterate {
    pub fn new(
        x: DVector<f64>,
        y: DVector<f64>,
        u: DVector<f64>,
        v: DVector<f64>,
        w: DVector<f64>,
    ) -> Self {
        Self { x, y, u, v, w }
    }

    /// Split a stacked vector of length `n + m + 2p + q`.
    pub fn from_stacked(dims: Dims, z: &DVector<f64>) -> Result<Self> {
        if z.len() != dims.variables() {
            return Err(Error::Dimension {
                what: "stacked iterate",
                expected: dims.variables(),
                got: z.len(),
            });
        }
        let Dims { n, m, p, q } = dims;
        let block = |start: usize, len: usize| z.rows(start, len).into_owned();
        Ok(Self {
            x: block(0, n),
            y: block(n, m),
            u: block(n + m, p),
            v: block(n + m + p, q),
            w: block(n + m + p + q, p),
        })
    }

    pub fn stacked(&self) -> DVector<f64> {
        let len = self.x.len() + self.y.len() + self.u.len() + self.v.len() + self.w.len();
        DVector::from_iterator(
            len,
            self.x
                .iter()
                .chain(self.y.iter())
                .chain(self.u.iter())
                .chain(self.v.iter())
                .chain(self.w.iter())
                .copied(),
        )
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.x.len(), self.y.len(), self.u.len(), self.v.len())
    }

    /// Verify that all blocks match `dims`.
    pub fn check(&self, dims: Dims) -> Result<()> {
        check_primal(dims, &self.x, &self.y)?;
        if self.u.len() != dims.p {
            return Err(Error::Dimension {
                what: "u",
                expected: dims.p,
                got: self.u.len(),
            });
        }
        if self.v.len() != dims.q {
            return Err(Error::Dimension {
                what: "v",
                expected: dims.q,
                got: self.v.len(),
            });
        }
        if self.w.len() != dims.p {
            return Err(Error::Dimension {
                what: "w",
                expected: dims.p,
                got: self.w.len(),
            });
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.stacked().iter().all(|v| v.is_finite())
    }
}

/// Stacked residual with block lengths `(n, m, m, p, q, p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualVector {
    values: DVector<f64>,
    dims: Dims,
}

/// Index of a residual block in stacking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualBlock {
    UpperStationarityX,
    UpperStationarityY,
    LowerStationarity,
    LowerComplementarityU,
    UpperComplementarity,
    LowerComplementarityW,
}

impl ResidualVector {
    pub fn from_values(dims: Dims, values: DVector<f64>) -> Result<Self> {
        if values.len() != dims.equations() {
            return Err(Error::Dimension {
                what: "residual",
                expected: dims.equations(),
                got: values.len(),
            });
        }
        Ok(Self { values, dims })
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn into_values(self) -> DVector<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.values.norm()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `(offset, length)` of a block.
    pub fn block_range(dims: Dims, block: ResidualBlock) -> (usize, usize) {
        let Dims { n, m, p, q } = dims;
        match block {
            ResidualBlock::UpperStationarityX => (0, n),
            ResidualBlock::UpperStationarityY => (n, m),
            ResidualBlock::LowerStationarity => (n + m, m),
            ResidualBlock::LowerComplementarityU => (n + 2 * m, p),
            ResidualBlock::UpperComplementarity => (n + 2 * m + p, q),
            ResidualBlock::LowerComplementarityW => (n + 2 * m + p + q, p),
        }
    }

    pub fn block(&self, block: ResidualBlock) -> DVector<f64> {
        let (start, len) = Self::block_range(self.dims, block);
        self.values.rows(start, len).into_owned()
    }
}

/// Penalty parameter `lambda > 0` and smoothing parameter `mu >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PenaltySmoothingState {
    pub lambda: f64,
    pub mu: f64,
}

impl PenaltySmoothingState {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda must be positive and finite, got {lambda}"
            )));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Config(format!(
                "mu must be nonnegative and finite, got {mu}"
            )));
        }
        Ok(Self { lambda, mu })
    }

    /// Same penalty, no smoothing.
    pub fn unsmoothed(self) -> Self {
        Self { mu: 0.0, ..self }
    }
}

/// Fischer-Burmeister function `sqrt(a^2 + b^2) - a - b`.
///
/// Zero exactly when `a >= 0`, `b >= 0` and `ab = 0`.
pub fn fb(a: f64, b: f64) -> f64 {
    a.hypot(b) - a - b
}

/// Smoothed pairing of a multiplier with a `<= 0` constraint:
/// `sqrt(mult^2 + cons^2 + 2mu) - mult + cons`.
///
/// At `mu = 0` this is `fb(mult, -cons)`. For `mu > 0` its zeros are exactly
/// the points with `mult > 0`, `cons < 0` and `-mult * cons = mu`.
pub fn fb_smoothed(mult: f64, cons: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        return fb(mult, -cons);
    }
    (mult * mult + cons * cons + 2.0 * mu).sqrt() - mult + cons
}

/// Assemble the residual at `z` for the given penalty and smoothing.
pub fn assemble_residual(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    state: PenaltySmoothingState,
) -> Result<ResidualVector> {
    let dims = problem.dims();
    z.check(dims)?;
    let Dims { n, m, p, q } = dims;
    let (x, y) = (&z.x, &z.y);

    let g = problem.lower_constraints(x, y);
    let big_g = problem.upper_constraints(x, y);
    let jac_g = problem.lower_constraint_jacobian(x, y);
    let jac_big_g = problem.upper_constraint_jacobian(x, y);

    let combined = &z.u - &z.w * state.lambda;
    let stationarity =
        problem.upper_gradient(x, y) + jac_g.tr_mul(&combined) + jac_big_g.tr_mul(&z.v);
    let jac_g_y = jac_g.columns(n, m);
    let lower = problem.lower_gradient_y(x, y) + jac_g_y.tr_mul(&z.w);

    let mut values = DVector::zeros(dims.equations());
    values.rows_mut(0, n + m).copy_from(&stationarity);
    values.rows_mut(n + m, m).copy_from(&lower);
    let mut offset = n + 2 * m;
    for (mult, cons) in [(&z.u, &g), (&z.v, &big_g), (&z.w, &g)] {
        for (j, (&a, &b)) in mult.iter().zip(cons.iter()).enumerate() {
            values[offset + j] = fb_smoothed(a, b, state.mu);
        }
        offset += mult.len();
    }
    debug_assert_eq!(offset, n + 2 * m + 2 * p + q);
    ResidualVector::from_values(dims, values)
}

/// `0.5 * |r|^2`.
pub fn least_squares_value(residual: &ResidualVector) -> f64 {
    0.5 * residual.values.norm_squared()
}

/// `|Res_mu(z) - Res_0(z)|` at fixed lambda.
pub fn smoothing_gap(
    problem: &dyn BilevelProblem,
    z: &Iterate,
    lambda: f64,
    mu: f64,
) -> Result<f64> {
    let smoothed = assemble_residual(problem, z, PenaltySmoothingState::new(lambda, mu)?)?;
    let exact = assemble_residual(problem, z, PenaltySmoothingState::new(lambda, 0.0)?)?;
    Ok((smoothed.values - exact.values).norm())
}
