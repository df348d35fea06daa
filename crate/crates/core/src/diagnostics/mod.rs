//! Inner argmins, dual and proximal values, the potential function, derived
//! constants, sufficient-decrease margins, error-bound probes and empirical
//! rate fitting.

mod constants;
mod decrease;
mod error_bound;
mod inner;
mod observer;
mod potential;
mod rate;

pub use constants::{constants, Constants};
pub use decrease::{check_sufficient_decrease, DecreaseReport};
pub use error_bound::{error_bound_ratio, ErrorBoundProbe};
pub use inner::{
    dual_gradient, dual_value, prox_value, prox_value_from, psi_value, solve_x_of_yz,
    solve_x_of_yz_from, y_plus, DualValue, ProxValue, INNER_MAX_ITER,
};
pub use observer::DiagnosticsObserver;
pub use potential::{potential, residual_exact, PotentialRecord};
pub use rate::fit_rate;

/// Default tolerance for inner argmin solves.
pub const DEFAULT_INNER_TOL: f64 = 1e-10;
/// Default tolerance for the ascent inside [`prox_value`].
pub const DEFAULT_PROX_TOL: f64 = 1e-8;
