//! Finite-difference Dirichlet solver for the translator operator family.
//!
//! The discrete operator is the non-divergence form
//! `Q[u] = (1+u_y²) u_xx - 2 u_x u_y u_xy + (1+u_x²) u_yy - G(W)`, `W = 1 + |Du|²`,
//! with `G = t W` (continuity family), `G = t W + μ W^{3/2}` (weighted
//! curvature) or `G = 2 t H W^{n/2}` (power family).

mod continuation;
mod newton;
mod operator;

pub use continuation::{continuity_solve, continuity_solve_to, mu_solve, solve_with};
pub use newton::{harmonic_extension, newton_solve, newton_solve_from};
pub use operator::{jacobian_apply, jacobian_entries, operator_partials, operator_value, residual, residual_values};

pub(crate) use newton::{newton_subset, Workspace};

use crate::error::{Error, Result};
use crate::geometry::ScalarField;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Translator,
    Weighted,
    Serrin,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OperatorParams {
    pub t: f64,
    pub mu: f64,
    /// `H` of the power family.
    pub h_coef: f64,
    /// `n` of the power family.
    pub n_exp: f64,
    pub mode: Mode,
}

impl OperatorParams {
    pub fn translator(t: f64) -> Self {
        OperatorParams { t, mu: 0.0, h_coef: 0.5, n_exp: 2.0, mode: Mode::Translator }
    }

    /// The minimal surface operator.
    pub fn minimal() -> Self {
        Self::translator(0.0)
    }

    pub fn weighted(t: f64, mu: f64) -> Self {
        OperatorParams { t, mu, h_coef: 0.5, n_exp: 2.0, mode: Mode::Weighted }
    }

    pub fn serrin(t: f64, h_coef: f64, n_exp: f64) -> Self {
        OperatorParams { t, mu: 0.0, h_coef, n_exp, mode: Mode::Serrin }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::BadParameter(format!("t must lie in [0, 1], got {}", self.t)));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(Error::BadParameter(format!("mu must be non-negative, got {}", self.mu)));
        }
        if !self.h_coef.is_finite() || !self.n_exp.is_finite() {
            return Err(Error::BadParameter("H and n must be finite".into()));
        }
        Ok(())
    }
}

/// Newton and continuation controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Sup-norm target for the row-scaled residual.
    pub tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Uniform continuation steps.
    pub steps: usize,
    /// Smallest continuation increment as a fraction of the full range.
    pub min_increment: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iterations: 50, max_halvings: 30, steps: 10, min_increment: 1.0 / 160.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub t: f64,
    pub mu: f64,
    pub sup_abs_u: f64,
    pub max_grad: f64,
    /// Value at the unknown nearest the centre of the enclosing disk.
    pub center_value: f64,
    pub newton_iterations: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    #[serde(skip_serializing)]
    pub solution: ScalarField,
    pub params: OperatorParams,
    /// Sup of the row-scaled residual.
    pub residual: f64,
    /// Sup of the unscaled residual.
    pub raw_residual: f64,
    pub iterations: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    /// Largest `u_{s2} - u_{s1}` over consecutive continuation values `s1 < s2`.
    pub ordering_violation: f64,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn h(&self) -> f64 {
        self.solution.grid().h()
    }
}
