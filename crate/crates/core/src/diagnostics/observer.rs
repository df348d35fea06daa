use crate::error::Result;
use crate::linalg::dist;
use crate::problem::{checked_grad_y, checked_value, MinMaxProblem};
use crate::scalar::Real;
use crate::solvers::StepObserver;
use crate::state::{ResidualKind, SolverParams, SolverState, TraceRecord};

use super::inner::{prox_value_from, psi_value, solve_x_of_yz_from};
use super::potential::PotentialRecord;

/// Fills exact residuals, potential values and `ψ` into trace records while a
/// run progresses. Inner solves are warm-started from the previous step.
pub struct DiagnosticsObserver<'a, T: Real, P: ?Sized> {
    problem: &'a P,
    params: SolverParams<T>,
    exact_every: Option<usize>,
    potential_every: Option<usize>,
    psi: bool,
    inner_tol: T,
    warm_prox: Option<(Vec<T>, Vec<T>)>,
    potentials: Vec<(usize, PotentialRecord<T>)>,
}

impl<'a, T: Real, P: MinMaxProblem<T> + ?Sized> DiagnosticsObserver<'a, T, P> {
    pub fn new(problem: &'a P, params: SolverParams<T>, inner_tol: T) -> Self {
        DiagnosticsObserver {
            problem,
            params,
            exact_every: None,
            potential_every: None,
            psi: false,
            inner_tol,
            warm_prox: None,
            potentials: Vec::new(),
        }
    }

    /// Replace the surrogate `ry` by the exact value every `k` iterations.
    pub fn exact_every(mut self, k: usize) -> Self {
        self.exact_every = Some(k.max(1));
        self
    }

    /// Record `φ` every `k` iterations.
    pub fn potential_every(mut self, k: usize) -> Self {
        self.potential_every = Some(k.max(1));
        self
    }

    /// Evaluate `ψ` numerically when the problem has no closed form.
    pub fn with_psi(mut self) -> Self {
        self.psi = true;
        self
    }

    pub fn potentials(&self) -> &[(usize, PotentialRecord<T>)] {
        &self.potentials
    }

    /// Potential at `state`, warm-starting the proximal ascent.
    pub fn potential_at(&mut self, state: &SolverState<T>) -> Result<PotentialRecord<T>> {
        let (p, tol) = (self.params.p, self.inner_tol);
        let d = dist(&state.x, &state.z);
        let k_value = checked_value(self.problem, &state.x, &state.y)? + p / T::lit(2.0) * d * d;
        let xd = solve_x_of_yz_from(self.problem, &state.y, &state.z, p, tol, &state.x)?;
        let dd = dist(&xd, &state.z);
        let d_value = checked_value(self.problem, &xd, &state.y)? + p / T::lit(2.0) * dd * dd;
        let (wy, wx) = match &self.warm_prox {
            Some((wy, wx)) => (wy.clone(), wx.clone()),
            None => (state.y.clone(), state.z.clone()),
        };
        let prox = prox_value_from(self.problem, &state.z, p, tol, &wy, &wx)?;
        self.warm_prox = Some((prox.y_star.clone(), prox.x_star.clone()));
        Ok(PotentialRecord::assemble(k_value, d_value, prox.value, tol))
    }

    /// `‖yᵗ − y₊ᵗ(zᵗ)‖` warm-started at `xᵗ⁺¹`.
    pub fn exact_dual_residual(&self, prev: &SolverState<T>, next: &SolverState<T>) -> Result<T> {
        let x = solve_x_of_yz_from(self.problem, &prev.y, &prev.z, self.params.p, self.inner_tol, &next.x)?;
        let g = checked_grad_y(self.problem, &x, &prev.y)?;
        let cand: Vec<T> = prev.y.iter().zip(&g).map(|(&y, &gi)| y + self.params.alpha * gi).collect();
        let yp = self.problem.project_y(&cand)?;
        Ok(dist(&prev.y, &yp))
    }
}

impl<T: Real, P: MinMaxProblem<T> + ?Sized> StepObserver<T> for DiagnosticsObserver<'_, T, P> {
    fn observe(
        &mut self,
        prev: &SolverState<T>,
        next: &SolverState<T>,
        record: &mut TraceRecord<T>,
    ) -> Result<()> {
        if self.exact_every.is_some_and(|k| next.t.is_multiple_of(k)) {
            record.ry = self.exact_dual_residual(prev, next)?;
            record.ry_kind = ResidualKind::Exact;
        }
        if self.potential_every.is_some_and(|k| next.t.is_multiple_of(k)) {
            let rec = self.potential_at(next)?;
            record.phi = Some(rec.phi);
            self.potentials.push((next.t, rec));
        }
        if self.psi && record.psi.is_none() {
            record.psi = Some(psi_value(self.problem, &next.x, self.inner_tol)?);
        }
        Ok(())
    }
}
