use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::problem::MinMaxProblem;
use crate::scalar::Real;

use super::constants::constants;
use super::inner::{prox_value, solve_x_of_yz, y_plus};

/// Dual error-bound probe at `(y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct ErrorBoundProbe<T> {
    /// `lhs / rhs`; `+∞` if `rhs = 0 < lhs − tol`, `0` if both are below `tol`.
    pub ratio: T,
    /// `‖x(y₊(z), z) − x*(z)‖`
    pub lhs: T,
    /// `‖y − y₊(z)‖`
    pub rhs: T,
    /// `α(p−L)·lhs²`
    pub weak_lhs: T,
    /// `(1 + αL + αLσ₂)·rhs·D(Y)`
    pub weak_rhs: T,
    pub tol: T,
}

impl<T: Real> ErrorBoundProbe<T> {
    /// The nonhomogeneous bound `α(p−L)lhs² ≤ (1+αL+αLσ₂)·rhs·D(Y)` up to `slack`.
    pub fn weak_bound_holds(&self, slack: T) -> bool {
        self.weak_lhs <= self.weak_rhs + slack
    }
}

pub fn error_bound_ratio<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    alpha: T,
    tol: T,
) -> Result<ErrorBoundProbe<T>> {
    let diameter = problem
        .diameter_y()
        .ok_or_else(|| Error::Unsupported("error-bound probe needs a compact Y".into()))?;
    let l = problem.lipschitz();
    let k = constants(l, p, T::one(), alpha, 1)?;
    let yp = y_plus(problem, y, z, p, alpha, tol)?;
    let x_plus = solve_x_of_yz(problem, &yp, z, p, tol)?;
    let prox = prox_value(problem, z, p, tol)?;
    let lhs = dist(&x_plus, &prox.x_star);
    let rhs = dist(y, &yp);
    let ratio = if lhs <= tol && rhs <= tol {
        T::zero()
    } else if rhs == T::zero() {
        T::infinity()
    } else {
        lhs / rhs
    };
    let weak_lhs = alpha * (p - l) * lhs * lhs;
    let weak_rhs = (T::one() + alpha * l + alpha * l * k.sigma2) * rhs * diameter;
    Ok(ErrorBoundProbe { ratio, lhs, rhs, weak_lhs, weak_rhs, tol })
}
