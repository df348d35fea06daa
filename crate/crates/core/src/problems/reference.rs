use super::kkt::{kkt_residual, KktReport, DEFAULT_SUPPORT_TOL, DEFAULT_TIE_TOL};
use super::FiniteMaxProblem;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, norm};
use crate::projections::project_simplex;
use crate::scalar::Real;

const DUAL_MAX_ITER: usize = 200_000;

/// High-accuracy KKT pair of a finite-max problem.
#[derive(Debug, Clone)]
pub struct ReferenceSolution<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub iterations: usize,
    pub report: KktReport<T>,
}

/// Prox-linear method: each step minimizes
/// `max_i [f_i(x) + ∇f_i(x)ᵀd] + (H/2)‖d‖²` over `x + d ∈ X`, with `H` the
/// component Hessian bound, by projected ascent on its simplex dual.
/// Returns once the step satisfies `H‖d‖ ≤ tol` and the pair meets the KKT
/// level `tol`.
pub fn solve_reference<T: Real>(
    problem: &FiniteMaxProblem<T>,
    x0: &[T],
    tol: T,
    max_iter: usize,
) -> Result<ReferenceSolution<T>> {
    let h = if problem.hessian_bound > T::zero() { problem.hessian_bound } else { T::one() };
    let m = problem.num_components();
    let mut x = problem.x_set.project(x0)?;
    let mut y = vec![T::one() / T::count(m); m];
    let mut last = T::infinity();
    for it in 0..max_iter {
        let f = problem.values(&x);
        let jac = problem.jacobian(&x);
        let step_of = |y: &[T]| -> Result<Vec<T>> {
            let mut v = x.clone();
            for (row, &yi) in jac.iter().zip(y) {
                axpy(-yi / h, row, &mut v);
            }
            let target = problem.x_set.project(&v)?;
            Ok(target.iter().zip(&x).map(|(&a, &b)| a - b).collect())
        };
        let jf: T = jac.iter().map(|r| norm(r).powi(2)).sum();
        let eta = if jf > T::zero() { h / jf } else { T::one() };
        let mut d = step_of(&y)?;
        for _ in 0..DUAL_MAX_ITER {
            let grad: Vec<T> = f
                .iter()
                .zip(&jac)
                .map(|(&fi, row)| fi + row.iter().zip(&d).map(|(&a, &b)| a * b).sum::<T>())
                .collect();
            let ascent: Vec<T> = y.iter().zip(&grad).map(|(&yi, &gi)| yi + eta * gi).collect();
            let next = project_simplex(&ascent)?;
            let moved = dist(&next, &y);
            y = next;
            d = step_of(&y)?;
            if moved <= T::epsilon() {
                break;
            }
        }
        last = h * norm(&d);
        if !last.is_finite() {
            return Err(Error::NonFinite { t: it });
        }
        if last <= tol {
            let report = kkt_residual(problem, &x, &y, T::lit(DEFAULT_TIE_TOL), T::lit(DEFAULT_SUPPORT_TOL))?;
            if report.is_kkt(tol) {
                return Ok(ReferenceSolution { x, y, iterations: it, report });
            }
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi = *xi + *di;
        }
    }
    Err(Error::Convergence { iterations: max_iter, residual: last.as_f64() })
}
