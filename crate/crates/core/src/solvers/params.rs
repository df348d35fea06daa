use crate::scalar::Real;
use crate::state::{alpha_bound, beta_bound, SolverParams};

/// Safety factor that keeps strict parameter inequalities strict in
/// floating point.
pub const DEFAULT_SAFETY: f64 = 0.99;

/// Theory-compliant parameters for Lipschitz constant `L` and `N` blocks.
///
/// Uses `p = 4L` and `c = 1/(2(p+L))`, then scales the `α` and `β` bounds by
/// `safety`.
pub fn derive_params<T: Real>(lipschitz: T, blocks: usize, safety: T) -> SolverParams<T> {
    let blocks = blocks.max(1);
    let p = T::lit(4.0) * lipschitz;
    let c = T::one() / (T::lit(2.0) * (p + lipschitz));
    let alpha = safety * alpha_bound(lipschitz, p, c, blocks);
    let beta = safety * beta_bound(lipschitz, p);
    SolverParams { p, c, alpha, beta, blocks }
}

/// Caps `β` at `0.99/√T` for a planned horizon of `T` iterations.
pub fn with_horizon<T: Real>(params: SolverParams<T>, horizon: usize) -> SolverParams<T> {
    let cap = T::lit(DEFAULT_SAFETY) / T::count(horizon.max(1)).sqrt();
    SolverParams { beta: params.beta.min(cap), ..params }
}
