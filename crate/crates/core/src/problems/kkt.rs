use serde::{Deserialize, Serialize};

use super::FiniteMaxProblem;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, Matrix};
use crate::scalar::Real;

/// Relative tie tolerance for the top-value set `T(x)`.
pub const DEFAULT_TIE_TOL: f64 = 1e-6;
/// Threshold above which `y_i` counts as supported.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-8;

/// KKT residuals of a finite-max problem at `(x, y)`, with `μ = max_i f_i(x)`
/// and `ν_i = μ − f_i(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktReport<T> {
    /// `‖x − P_X(x − Σ y_i ∇f_i(x))‖`, equal to `‖Σ y_i ∇f_i(x)‖` when `X = ℝⁿ`.
    pub grad_residual: T,
    /// `max(|Σ y_i − 1|, max_i (−y_i)⁺)`.
    pub feasibility: T,
    pub mu: T,
    pub nu: Vec<T>,
    /// `Σ |y_i| ν_i`.
    pub complementarity: T,
    /// Indices within `tie_tol · max(1, spread)` of `μ`.
    pub active_set: Vec<usize>,
    /// Indices with `y_i > support_tol`.
    pub support: Vec<usize>,
}

impl<T: Real> KktReport<T> {
    pub fn level(&self) -> T {
        self.grad_residual.max(self.feasibility).max(self.complementarity)
    }

    pub fn is_kkt(&self, level: T) -> bool {
        self.level() <= level
    }
}

fn active_set<T: Real>(values: &[T], tie_tol: T) -> (T, Vec<usize>) {
    let mu = values.iter().copied().fold(T::neg_infinity(), T::max);
    let low = values.iter().copied().fold(T::infinity(), T::min);
    let threshold = tie_tol * T::one().max(mu - low);
    let set = (0..values.len()).filter(|&i| values[i] >= mu - threshold).collect();
    (mu, set)
}

pub fn kkt_residual<T: Real>(
    problem: &FiniteMaxProblem<T>,
    x: &[T],
    y: &[T],
    tie_tol: T,
    support_tol: T,
) -> Result<KktReport<T>> {
    let m = problem.num_components();
    if x.len() != problem.n || y.len() != m {
        return Err(Error::Dimension(format!(
            "expected x in R^{} and y in R^{m}, got {} and {}",
            problem.n,
            x.len(),
            y.len()
        )));
    }
    let values = problem.values(x);
    let mut g = vec![T::zero(); x.len()];
    for (c, &yi) in problem.components.iter().zip(y) {
        axpy(yi, &c.gradient(x), &mut g);
    }
    let shifted: Vec<T> = x.iter().zip(&g).map(|(&a, &b)| a - b).collect();
    let grad_residual = dist(x, &problem.x_set.project(&shifted)?);
    let sum: T = y.iter().copied().sum();
    let negative = y.iter().fold(T::zero(), |acc, &v| acc.max(-v));
    let (mu, active) = active_set(&values, tie_tol);
    let nu: Vec<T> = values.iter().map(|&f| mu - f).collect();
    let complementarity = y.iter().zip(&nu).map(|(&yi, &ni)| yi.abs() * ni).sum();
    Ok(KktReport {
        grad_residual,
        feasibility: (sum - T::one()).abs().max(negative),
        mu,
        nu,
        complementarity,
        active_set: active,
        support: (0..m).filter(|&i| y[i] > support_tol).collect(),
    })
}

/// Smallest multiplier `ν_i` over indices outside the support of `y`;
/// `+∞` when every index is supported.
pub fn check_strict_complementarity<T: Real>(
    problem: &FiniteMaxProblem<T>,
    x: &[T],
    y: &[T],
    tol: T,
) -> Result<T> {
    let report = kkt_residual(problem, x, y, T::lit(DEFAULT_TIE_TOL), T::lit(DEFAULT_SUPPORT_TOL))?;
    if !report.is_kkt(tol) {
        return Err(Error::Precondition(format!(
            "not a KKT pair at level {tol:e}: grad_residual {:e}, feasibility {:e}, complementarity {:e}",
            report.grad_residual, report.feasibility, report.complementarity
        )));
    }
    Ok((0..y.len())
        .filter(|i| !report.support.contains(i))
        .map(|i| report.nu[i])
        .fold(T::infinity(), T::min))
}

/// Smallest singular value of `M(x)`, whose rows are `[∇f_i(x)ᵀ, 1]` over
/// the top-value set `T(x)`.
pub fn check_regularity<T: Real>(problem: &FiniteMaxProblem<T>, x: &[T], tie_tol: T) -> Result<T> {
    if x.len() != problem.n {
        return Err(Error::Dimension(format!("expected x in R^{}, got {}", problem.n, x.len())));
    }
    let (_, active) = active_set(&problem.values(x), tie_tol);
    let rows: Vec<Vec<T>> = active
        .iter()
        .map(|&i| {
            let mut row = problem.components[i].gradient(x);
            row.push(T::one());
            row
        })
        .collect();
    Ok(Matrix::from_rows(&rows)?.min_singular_value())
}
