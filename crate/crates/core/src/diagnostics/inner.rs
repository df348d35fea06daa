use crate::error::{Error, Result};
use crate::linalg::{dist, dot};
use crate::problem::{checked_grad_x, checked_grad_y, checked_value, MinMaxProblem};
use crate::scalar::Real;

use super::constants::constants;

/// Iteration cap shared by the inner solvers.
pub const INNER_MAX_ITER: usize = 1_000_000;

fn require_strongly_convex<T: Real, P: MinMaxProblem<T> + ?Sized>(problem: &P, p: T) -> Result<T> {
    let rho = problem.weak_convexity();
    if !(p > rho) {
        return Err(Error::Parameter(format!(
            "smoothing p = {p} must exceed the weak-convexity modulus {rho}"
        )));
    }
    Ok(p - rho)
}

/// `x(y, z) = argmin_{x∈X} f(x, y) + p/2‖x − z‖²`, warm-started at `z`.
pub fn solve_x_of_yz<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    tol: T,
) -> Result<Vec<T>> {
    let start = problem.project_x(z)?;
    solve_x_of_yz_from(problem, y, z, p, tol, &start)
}

/// [`solve_x_of_yz`] from an explicit warm start.
///
/// Projected gradient descent with step `1/(L+p)`, stopped once the scaled
/// gradient mapping `(L+p)‖x − P_X(x − ∇K/(L+p))‖` is at most `tol`.
pub fn solve_x_of_yz_from<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    tol: T,
    warm: &[T],
) -> Result<Vec<T>> {
    require_strongly_convex(problem, p)?;
    let smooth = problem.lipschitz() + p;
    let step = T::one() / smooth;
    let mut x = problem.project_x(warm)?;
    let mut mapping = T::infinity();
    for _ in 0..INNER_MAX_ITER {
        let g = checked_grad_x(problem, &x, y)?;
        let cand: Vec<T> = x
            .iter()
            .zip(&g)
            .zip(z)
            .map(|((&xi, &gi), &zi)| xi - step * (gi + p * (xi - zi)))
            .collect();
        let next = problem.project_x(&cand)?;
        mapping = smooth * dist(&x, &next);
        x = next;
        if mapping <= tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence { iterations: INNER_MAX_ITER, residual: mapping.as_f64() })
}

/// `y₊(z) = P_Y(y + α ∇_y f(x(y, z), y))`.
pub fn y_plus<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    alpha: T,
    tol: T,
) -> Result<Vec<T>> {
    let x = solve_x_of_yz(problem, y, z, p, tol)?;
    let g = checked_grad_y(problem, &x, y)?;
    let cand: Vec<T> = y.iter().zip(&g).map(|(&yi, &gi)| yi + alpha * gi).collect();
    problem.project_y(&cand)
}

fn smoothing_value<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x: &[T],
    y: &[T],
    z: &[T],
    p: T,
) -> Result<T> {
    let d = dist(x, z);
    Ok(checked_value(problem, x, y)? + p / T::lit(2.0) * d * d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualValue<T> {
    /// `d(y, z)`
    pub value: T,
    /// The inner argmin the value was evaluated at.
    pub x: Vec<T>,
    /// Bound on the value error: `(L+p)/(2(p−ρ)²)·tol²` plus the first-order
    /// term `tol²/(p−ρ)`.
    pub accuracy: T,
    pub tol: T,
}

/// `d(y, z) = min_{x∈X} K(x, z; y)`.
pub fn dual_value<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    tol: T,
) -> Result<DualValue<T>> {
    let modulus = require_strongly_convex(problem, p)?;
    let x = solve_x_of_yz(problem, y, z, p, tol)?;
    let value = smoothing_value(problem, &x, y, z, p)?;
    let smooth = problem.lipschitz() + p;
    let accuracy = smooth / (T::lit(2.0) * modulus * modulus) * tol * tol + tol * tol / modulus;
    Ok(DualValue { value, x, accuracy, tol })
}

/// `∇_y d(y, z) = ∇_y f(x(y, z), y)` together with `x(y, z)`.
pub fn dual_gradient<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    y: &[T],
    z: &[T],
    p: T,
    tol: T,
    warm: &[T],
) -> Result<(Vec<T>, Vec<T>)> {
    let x = solve_x_of_yz_from(problem, y, z, p, tol, warm)?;
    let g = checked_grad_y(problem, &x, y)?;
    Ok((g, x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxValue<T> {
    /// `P(z) = min_x max_y K(x, z; y)`
    pub value: T,
    pub x_star: Vec<T>,
    pub y_star: Vec<T>,
    pub iterations: usize,
    pub tol: T,
}

/// `P(z)` by projected gradient ascent on the concave `d(·, z)` with step
/// `1/L_d`, starting from the projection of the origin onto Y.
pub fn prox_value<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    z: &[T],
    p: T,
    tol: T,
) -> Result<ProxValue<T>> {
    let y0 = problem.project_y(&vec![T::zero(); problem.dim_y()])?;
    prox_value_from(problem, z, p, tol, &y0, z)
}

/// [`prox_value`] with warm starts for the dual ascent and the inner argmin.
pub fn prox_value_from<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    z: &[T],
    p: T,
    tol: T,
    warm_y: &[T],
    warm_x: &[T],
) -> Result<ProxValue<T>> {
    if !problem.y_set().is_compact() {
        return Err(Error::Unsupported("proximal value needs a compact Y".into()));
    }
    require_strongly_convex(problem, p)?;
    let l = problem.lipschitz();
    let l_d = if p > l {
        constants(l, p, T::one(), T::one(), 1)?.l_d
    } else {
        l + l * l / (p - problem.weak_convexity())
    };
    let step = T::one() / l_d;
    let inner_tol = tol / T::lit(10.0);

    let mut y = problem.project_y(warm_y)?;
    let mut x = warm_x.to_vec();
    let mut gap = T::infinity();
    for it in 0..INNER_MAX_ITER {
        let (g, xs) = dual_gradient(problem, &y, z, p, inner_tol, &x)?;
        x = xs;
        let cand: Vec<T> = y.iter().zip(&g).map(|(&yi, &gi)| yi + step * gi).collect();
        let next = problem.project_y(&cand)?;
        gap = dist(&y, &next);
        if gap <= tol {
            let value = smoothing_value(problem, &x, &y, z, p)?;
            return Ok(ProxValue { value, x_star: x, y_star: y, iterations: it + 1, tol });
        }
        y = next;
    }
    Err(Error::Convergence { iterations: INNER_MAX_ITER, residual: gap.as_f64() })
}

/// `ψ(x) = max_{y∈Y} f(x, y)`: the closed form when the problem has one,
/// otherwise projected gradient ascent in `y` with step `1/L`.
pub fn psi_value<T: Real, P: MinMaxProblem<T> + ?Sized>(problem: &P, x: &[T], tol: T) -> Result<T> {
    if let Some(v) = problem.psi(x) {
        return Ok(v);
    }
    if !problem.y_set().is_compact() {
        return Err(Error::Unsupported("psi needs a compact Y or a closed form".into()));
    }
    let step = T::one() / problem.lipschitz();
    let mut y = problem.project_y(&vec![T::zero(); problem.dim_y()])?;
    for _ in 0..INNER_MAX_ITER {
        let g = checked_grad_y(problem, x, &y)?;
        let cand: Vec<T> = y.iter().zip(&g).map(|(&yi, &gi)| yi + step * gi).collect();
        let next = problem.project_y(&cand)?;
        let moved = dist(&y, &next);
        y = next;
        if moved <= tol || dot(&g, &g) == T::zero() {
            return checked_value(problem, x, &y);
        }
    }
    Err(Error::Convergence { iterations: INNER_MAX_ITER, residual: f64::NAN })
}
