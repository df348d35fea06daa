use crate::error::{Error, Result};
use crate::linalg::first_non_finite;
use crate::problem::{checked_grad_x, checked_grad_y, MinMaxProblem};
use crate::scalar::Real;
use crate::state::{Algorithm, SolverParams, SolverState};

fn ensure_finite<T: Real>(v: &[T], t: usize) -> Result<()> {
    match first_non_finite(v) {
        Some(_) => Err(Error::NonFinite { t }),
        None => Ok(()),
    }
}

fn ensure_in_region<T: Real, P: MinMaxProblem<T> + ?Sized>(problem: &P, x: &[T], t: usize) -> Result<()> {
    match problem.region().violation(x) {
        Some(coordinate) => Err(Error::RegionViolation { t, coordinate, value: x[coordinate].as_f64() }),
        None => Ok(()),
    }
}

#[inline]
fn smoothed_primal<T: Real>(x: T, g: T, z: T, p: T, c: T) -> T {
    x - c * (g + p * (x - z))
}

/// Ascent step `y' = P_Y(y + α ∇_y f(x', y))` shared by every scheme.
fn dual_update<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x_next: &[T],
    y: &[T],
    alpha: T,
    t: usize,
) -> Result<Vec<T>> {
    let gy = checked_grad_y(problem, x_next, y)?;
    let cand: Vec<T> = y.iter().zip(&gy).map(|(&yi, &g)| yi + alpha * g).collect();
    ensure_finite(&cand, t)?;
    problem.project_y(&cand)
}

/// One iteration of plain gradient descent-ascent. The ascent step uses the
/// fresh primal iterate.
pub fn gda_step<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    state: &SolverState<T>,
    c: T,
    alpha: T,
) -> Result<SolverState<T>> {
    let t = state.t + 1;
    let gx = checked_grad_x(problem, &state.x, &state.y)?;
    let cand: Vec<T> = state.x.iter().zip(&gx).map(|(&x, &g)| x - c * g).collect();
    ensure_finite(&cand, t)?;
    let x = problem.project_x(&cand)?;
    ensure_in_region(problem, &x, t)?;
    let y = dual_update(problem, &x, &state.y, alpha, t)?;
    Ok(SolverState { x, y, z: state.z.clone(), t })
}

/// One iteration of smoothed gradient descent-ascent on
/// `K(x, z; y) = f(x, y) + p/2‖x − z‖²`.
pub fn smoothed_gda_step<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    state: &SolverState<T>,
    params: &SolverParams<T>,
) -> Result<SolverState<T>> {
    let t = state.t + 1;
    let gx = checked_grad_x(problem, &state.x, &state.y)?;
    let cand: Vec<T> = state
        .x
        .iter()
        .zip(&gx)
        .zip(&state.z)
        .map(|((&x, &g), &z)| smoothed_primal(x, g, z, params.p, params.c))
        .collect();
    ensure_finite(&cand, t)?;
    let x = problem.project_x(&cand)?;
    ensure_in_region(problem, &x, t)?;
    let y = dual_update(problem, &x, &state.y, params.alpha, t)?;
    let z = average(&state.z, &x, params.beta);
    Ok(SolverState { x, y, z, t })
}

/// One iteration of the block variant: primal blocks are updated in order,
/// each seeing the already-updated earlier blocks.
pub fn smoothed_bgda_step<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    state: &SolverState<T>,
    params: &SolverParams<T>,
) -> Result<SolverState<T>> {
    let blocks = problem
        .blocks()
        .ok_or_else(|| Error::Config("block variant requires a declared block structure".into()))?;
    if !problem.x_set().is_product_over(blocks) {
        return Err(Error::Config("X is not a product set over the declared blocks".into()));
    }
    let t = state.t + 1;
    let mut x = state.x.clone();
    for block in blocks {
        let gx = checked_grad_x(problem, &x, &state.y)?;
        let cand: Vec<T> = block
            .clone()
            .map(|i| smoothed_primal(x[i], gx[i], state.z[i], params.p, params.c))
            .collect();
        ensure_finite(&cand, t)?;
        let updated = problem.x_set().project_block(block.clone(), &cand)?;
        x[block.clone()].copy_from_slice(&updated);
    }
    ensure_in_region(problem, &x, t)?;
    let y = dual_update(problem, &x, &state.y, params.alpha, t)?;
    let z = average(&state.z, &x, params.beta);
    Ok(SolverState { x, y, z, t })
}

fn average<T: Real>(z: &[T], x: &[T], beta: T) -> Vec<T> {
    if beta == T::one() {
        return x.to_vec();
    }
    z.iter().zip(x).map(|(&zi, &xi)| zi + beta * (xi - zi)).collect()
}

/// Dispatches one iteration of `algorithm`. GDA uses `params.c` and
/// `params.alpha` only.
pub fn step<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    state: &SolverState<T>,
    params: &SolverParams<T>,
) -> Result<SolverState<T>> {
    match algorithm {
        Algorithm::Gda => gda_step(problem, state, params.c, params.alpha),
        Algorithm::SmoothedGda => smoothed_gda_step(problem, state, params),
        Algorithm::SmoothedBgda => smoothed_bgda_step(problem, state, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{FnProblem, Region};
    use crate::projections::FeasibleSet;

    fn bilinear() -> FnProblem<f64> {
        FnProblem::new(
            FeasibleSet::whole_space(1),
            FeasibleSet::whole_space(1),
            1.0,
            |x, y| x[0] * y[0],
            |_, y| vec![y[0]],
            |x, _| vec![x[0]],
        )
        .unwrap()
    }

    fn st(x: f64, y: f64, z: f64) -> SolverState<f64> {
        SolverState { x: vec![x], y: vec![y], z: vec![z], t: 0 }
    }

    fn approx(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-14
    }

    #[test]
    fn gda_single_step() {
        let next = gda_step(&bilinear(), &st(1.0, 1.0, 1.0), 0.1, 0.1).unwrap();
        assert!(approx(next.x[0], 0.9));
        assert!(approx(next.y[0], 1.09));
        assert_eq!(next.z, vec![1.0]);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn gda_fixed_point_and_zero_steps() {
        let next = gda_step(&bilinear(), &st(0.0, 0.0, 0.0), 0.1, 0.1).unwrap();
        assert_eq!((next.x[0], next.y[0]), (0.0, 0.0));
        let frozen = gda_step(&bilinear(), &st(0.7, -0.3, 0.0), 0.0, 0.0).unwrap();
        assert_eq!((frozen.x[0], frozen.y[0], frozen.t), (0.7, -0.3, 1));
    }

    #[test]
    fn smoothed_single_step() {
        let prm = SolverParams::new(1.0, 0.1, 0.1, 0.5);
        let next = smoothed_gda_step(&bilinear(), &st(1.0, 1.0, 1.0), &prm).unwrap();
        assert!(approx(next.x[0], 0.9));
        assert!(approx(next.y[0], 1.09));
        assert!(approx(next.z[0], 0.95));
    }

    #[test]
    fn smoothed_fixed_point() {
        let prm = SolverParams::new(1.0, 0.1, 0.1, 0.5);
        let next = smoothed_gda_step(&bilinear(), &st(0.0, 0.0, 0.0), &prm).unwrap();
        assert_eq!((next.x[0], next.y[0], next.z[0]), (0.0, 0.0, 0.0));
    }

    #[test]
    fn unit_beta_copies_primal_into_center() {
        let prm = SolverParams::new(2.0, 0.1, 0.1, 1.0);
        let next = smoothed_gda_step(&bilinear(), &st(0.3, -0.7, 1.1), &prm).unwrap();
        assert_eq!(next.z, next.x);
    }

    #[test]
    fn region_violation_is_reported() {
        let p = bilinear().with_region(Region::cube(1, -0.5, 0.5).unwrap()).unwrap();
        let prm = SolverParams::new(1.0, 0.1, 0.1, 0.5);
        let err = smoothed_gda_step(&p, &st(0.5, -10.0, 0.5), &prm).unwrap_err();
        assert!(matches!(err, Error::RegionViolation { t: 1, coordinate: 0, .. }));
    }

    #[test]
    fn block_sweep_sees_updated_blocks() {
        // f = (x1 + x2) y
        let p = FnProblem::new(
            FeasibleSet::whole_space(2),
            FeasibleSet::whole_space(1),
            2f64.sqrt(),
            |x, y| (x[0] + x[1]) * y[0],
            |_, y| vec![y[0], y[0]],
            |x, _| vec![x[0] + x[1]],
        )
        .unwrap()
        .with_blocks(vec![0..1, 1..2])
        .unwrap();
        let prm = SolverParams::new(1.0, 0.1, 0.1, 0.5).with_blocks(2);
        let s0 = SolverState { x: vec![1.0, 1.0], y: vec![1.0], z: vec![1.0, 1.0], t: 0 };
        let next = smoothed_bgda_step(&p, &s0, &prm).unwrap();
        assert!(approx(next.x[0], 0.9) && approx(next.x[1], 0.9));
        assert!(approx(next.y[0], 1.18));
        assert!(approx(next.z[0], 0.95) && approx(next.z[1], 0.95));
    }

    #[test]
    fn block_variant_needs_blocks() {
        let prm = SolverParams::new(1.0, 0.1, 0.1, 0.5);
        assert!(matches!(
            smoothed_bgda_step(&bilinear(), &st(1.0, 1.0, 1.0), &prm),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn symmetric_blocks_get_identical_updates() {
        // f = (x1² + x2²) y
        let p = FnProblem::new(
            FeasibleSet::whole_space(2),
            FeasibleSet::cube(1, 0.0, 1.0).unwrap(),
            10.0,
            |x, y| (x[0] * x[0] + x[1] * x[1]) * y[0],
            |x, y| vec![2.0 * x[0] * y[0], 2.0 * x[1] * y[0]],
            |x, _| vec![x[0] * x[0] + x[1] * x[1]],
        )
        .unwrap()
        .with_blocks(vec![0..1, 1..2])
        .unwrap();
        let prm = SolverParams::new(2.0, 0.05, 0.05, 0.3).with_blocks(2);
        let mut s = SolverState { x: vec![0.8, 0.8], y: vec![0.5], z: vec![0.8, 0.8], t: 0 };
        for _ in 0..20 {
            s = smoothed_bgda_step(&p, &s, &prm).unwrap();
            assert_eq!(s.x[0], s.x[1]);
        }
    }
}
