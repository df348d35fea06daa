use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::problem::{checked_value, MinMaxProblem};
use crate::scalar::Real;
use crate::state::{ResidualKind, Residuals, SolverState};

use super::inner::{dual_value, prox_value, y_plus};

/// Components of `φ = K − 2d + 2P` at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PotentialRecord<T> {
    pub k_value: T,
    pub d_value: T,
    pub p_value: T,
    pub phi: T,
    pub inner_tol: T,
}

impl<T: Real> PotentialRecord<T> {
    pub(crate) fn assemble(k_value: T, d_value: T, p_value: T, inner_tol: T) -> Self {
        let two = T::lit(2.0);
        PotentialRecord { k_value, d_value, p_value, phi: k_value - two * d_value + two * p_value, inner_tol }
    }
}

/// Evaluates `K(x, z; y)`, `d(y, z)` and `P(z)` at the state's iterates.
/// `tol` is used for the inner argmin and for the proximal ascent.
pub fn potential<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    state: &SolverState<T>,
    p: T,
    tol: T,
) -> Result<PotentialRecord<T>> {
    let d = dist(&state.x, &state.z);
    let k_value = checked_value(problem, &state.x, &state.y)? + p / T::lit(2.0) * d * d;
    let d_value = dual_value(problem, &state.y, &state.z, p, tol)?.value;
    let p_value = prox_value(problem, &state.z, p, tol)?.value;
    Ok(PotentialRecord::assemble(k_value, d_value, p_value, tol))
}

/// Residual triple with the exact dual residual `‖yᵗ − y₊ᵗ(zᵗ)‖`.
pub fn residual_exact<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    prev: &SolverState<T>,
    next: &SolverState<T>,
    p: T,
    alpha: T,
    tol: T,
) -> Result<Residuals<T>> {
    if next.t != prev.t + 1 {
        return Err(Error::Usage(format!(
            "exact residuals need adjacent states (got t={} and t={})",
            prev.t, next.t
        )));
    }
    let yp = y_plus(problem, &prev.y, &prev.z, p, alpha, tol)?;
    Ok(Residuals {
        rx: dist(&prev.x, &next.x),
        ry: dist(&prev.y, &yp),
        rz: dist(&next.x, &prev.z),
        kind: ResidualKind::Exact,
    })
}
