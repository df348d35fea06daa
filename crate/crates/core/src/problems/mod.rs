//! Problem instances: bilinear games, finite-max quadratics, robust
//! regression, plus KKT and assumption checkers for the finite-max class.

mod bilinear;
mod finite_max;
mod generate;
mod instance;
mod kkt;
mod reference;

pub use bilinear::{make_bilinear, Bilinear};
pub use finite_max::{
    make_robust_regression, Component, FiniteMaxProblem, Quadratic, RegressionMap, SmoothComponent,
    SmoothMap,
};
pub use generate::{make_finite_max_quadratic, GeneratorSpec};
pub use instance::{InstanceDoc, QuadraticDoc, RegionDoc};
pub use kkt::{
    check_regularity, check_strict_complementarity, kkt_residual, KktReport, DEFAULT_SUPPORT_TOL,
    DEFAULT_TIE_TOL,
};
pub use reference::{solve_reference, ReferenceSolution};

use crate::error::Result;
use crate::linalg::Matrix;
use crate::problem::Region;
use crate::projections::FeasibleSet;
use crate::scalar::Real;

fn quad<T: Real>(a: f64, b: f64, c: f64) -> Quadratic<T> {
    Quadratic::new(
        Matrix::from_row_major(1, 1, vec![T::lit(a)]).expect("1x1"),
        vec![T::lit(b)],
        T::lit(c),
    )
    .expect("valid scalar quadratic")
}

/// `f₁ = (x−1)²`, `f₂ = (x+1)²` on `[-5, 5]`: solution `x* = 0`,
/// `y* = (½, ½)`, min-max value 1.
pub fn hand_two_component<T: Real>() -> Result<FiniteMaxProblem<T>> {
    FiniteMaxProblem::from_quadratics(
        vec![quad(2.0, -2.0, 1.0), quad(2.0, 2.0, 1.0)],
        FeasibleSet::whole_space(1),
        Region::cube(1, T::lit(-5.0), T::lit(5.0))?,
    )
    .map(|p| p.with_id("hand-2").with_lower_bound(T::one()))
}

/// Adds `f₃ = x² + 10` to [`hand_two_component`]: solution `x* = 0`,
/// `y* = (0, 0, 1)`, min-max value 10.
pub fn hand_three_component<T: Real>() -> Result<FiniteMaxProblem<T>> {
    FiniteMaxProblem::from_quadratics(
        vec![quad(2.0, -2.0, 1.0), quad(2.0, 2.0, 1.0), quad(2.0, 0.0, 10.0)],
        FeasibleSet::whole_space(1),
        Region::cube(1, T::lit(-5.0), T::lit(5.0))?,
    )
    .map(|p| p.with_id("hand-3").with_lower_bound(T::lit(10.0)))
}
