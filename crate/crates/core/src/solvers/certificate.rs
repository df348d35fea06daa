use serde::{Deserialize, Serialize};

use crate::diagnostics::constants;
use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::problem::{checked_grad_x, checked_grad_y, MinMaxProblem};
use crate::scalar::Real;
use crate::state::{SolverParams, SolverState};

/// Explicit optimality witnesses for the pair `(xᵗ⁺¹, yᵗ⁺¹)`.
///
/// `u ∈ ∇_x f(x', y') + N_X(x')` and `v ∈ −∇_y f(x', y') + N_Y(y')` hold by
/// projection optimality of the step that produced the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Certificate<T> {
    /// Surrogate residual level `max{rx, ‖Δy‖ + κ rx, rz}` of the step.
    pub epsilon: T,
    pub lambda_bar: T,
    pub u_norm: T,
    pub v_norm: T,
    pub kappa: T,
}

impl<T: Real> Certificate<T> {
    /// Whether both witnesses obey `‖·‖ ≤ λ̄ ε + slack` for residual level `eps`.
    pub fn within(&self, eps: T, slack: T) -> bool {
        let bound = self.lambda_bar * eps + slack;
        self.u_norm <= bound && self.v_norm <= bound
    }
}

/// Builds the stationarity witnesses for a smoothed step `prev → next`.
///
/// When `params.blocks > 1` and the problem declares blocks, the primal
/// witness accounts for the sequential block sweep.
pub fn certificate<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    prev: &SolverState<T>,
    next: &SolverState<T>,
    params: &SolverParams<T>,
) -> Result<Certificate<T>> {
    if next.t != prev.t + 1 {
        return Err(Error::Usage(format!(
            "certificate needs adjacent states (got t={} and t={})",
            prev.t, next.t
        )));
    }
    let k = constants(problem.lipschitz(), params.p, params.c, params.alpha, params.blocks)?;
    let inv_c = T::one() / params.c;
    let inv_alpha = T::one() / params.alpha;

    let g_new = checked_grad_x(problem, &next.x, &next.y)?;
    // gradient the primal step actually used, per coordinate
    let g_used = match problem.blocks() {
        Some(blocks) if params.blocks > 1 => {
            let mut used = vec![T::zero(); prev.x.len()];
            let mut mix = prev.x.clone();
            for block in blocks {
                let g = checked_grad_x(problem, &mix, &prev.y)?;
                used[block.clone()].copy_from_slice(&g[block.clone()]);
                mix[block.clone()].copy_from_slice(&next.x[block.clone()]);
            }
            used
        }
        _ => checked_grad_x(problem, &prev.x, &prev.y)?,
    };
    let u: Vec<T> = (0..prev.x.len())
        .map(|i| {
            g_new[i] - g_used[i]
                - params.p * (prev.x[i] - prev.z[i])
                - inv_c * (next.x[i] - prev.x[i])
        })
        .collect();

    let gy_used = checked_grad_y(problem, &next.x, &prev.y)?;
    let gy_new = checked_grad_y(problem, &next.x, &next.y)?;
    let v: Vec<T> = (0..prev.y.len())
        .map(|j| gy_used[j] - gy_new[j] - inv_alpha * (next.y[j] - prev.y[j]))
        .collect();

    let rx = dist(&prev.x, &next.x);
    let epsilon = rx
        .max(dist(&prev.y, &next.y) + k.kappa * rx)
        .max(dist(&next.x, &prev.z));
    Ok(Certificate { epsilon, lambda_bar: k.lambda_bar, u_norm: norm(&u), v_norm: norm(&v), kappa: k.kappa })
}
