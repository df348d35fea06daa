//! Gradient descent-ascent solvers for nonconvex-concave min-max problems
//! `min_{x∈X} max_{y∈Y} f(x, y)`.
//!
//! Three iterations are provided: plain projected GDA, Smoothed-GDA, which
//! adds a proximal term `p/2‖x − z‖²` around a slowly averaged anchor `z`,
//! and its block-coordinate variant Smoothed-BGDA. Around them sit the
//! diagnostics needed to check the iterations behave as the theory says
//! (potential function, sufficient decrease, dual error bounds, derived
//! constants, empirical rates) and a set of test problems with KKT checkers.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::single_range_in_vec_init)]

pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod problem;
pub mod problems;
pub mod projections;
pub mod sampling;
pub mod scalar;
pub mod solvers;
pub mod state;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use problem::{check_gradients, audit_lipschitz, FnProblem, MinMaxProblem, Region};
pub use projections::{project_simplex, FeasibleSet};
pub use scalar::Real;
pub use solvers::{derive_params, run, run_observed, RecordOptions, StopReason, StopRule};
pub use state::{Algorithm, IterateTrace, ResidualKind, SolverParams, SolverState, TraceRecord};

pub type Params = SolverParams<f64>;
pub type State = SolverState<f64>;
pub type Trace = IterateTrace<f64>;
pub type Record = TraceRecord<f64>;
pub type Set = FeasibleSet<f64>;
pub type Mat = Matrix<f64>;
pub type Outcome = solvers::RunOutcome<f64>;
pub type Certificate = solvers::Certificate<f64>;
pub type Constants = diagnostics::Constants<f64>;
pub type FiniteMax = problems::FiniteMaxProblem<f64>;
pub type BilinearGame = problems::Bilinear<f64>;
