use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::diagnostics::constants;
use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::problem::{checked_value, MinMaxProblem};
use crate::scalar::Real;
use crate::state::{
    Algorithm, IterateTrace, ResidualKind, SolverParams, SolverState, TraceMeta, TraceRecord,
};

use super::steps::step;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopRule<T> {
    pub max_iter: usize,
    pub tol: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecordOptions {
    /// Record every `stride`-th iteration (the final one is always recorded).
    pub stride: usize,
    /// Fill `psi` where the problem has a closed form.
    pub psi: bool,
    pub wall_clock: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions { stride: 1, psi: true, wall_clock: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TolReached,
    MaxIter,
    Diverged,
    RegionViolation,
}

impl StopReason {
    pub fn name(&self) -> &'static str {
        match self {
            StopReason::TolReached => "tol-reached",
            StopReason::MaxIter => "max-iter",
            StopReason::Diverged => "diverged",
            StopReason::RegionViolation => "region-violation",
        }
    }

    pub fn is_clean(&self) -> bool {
        matches!(self, StopReason::TolReached | StopReason::MaxIter)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome<T> {
    pub trace: IterateTrace<T>,
    /// Last valid state.
    pub state: SolverState<T>,
    /// State before the last valid step, when one was taken.
    pub previous: Option<SolverState<T>>,
    pub stop: StopReason,
    /// The error that aborted the run, if any.
    pub error: Option<Error>,
    /// Final value of the stopping measure.
    pub final_measure: Option<T>,
}

/// Hook invoked on every recorded step; may fill exact residuals or the
/// potential into the record.
pub trait StepObserver<T: Real> {
    fn observe(
        &mut self,
        prev: &SolverState<T>,
        next: &SolverState<T>,
        record: &mut TraceRecord<T>,
    ) -> Result<()>;
}

struct NoObserver;

impl<T: Real> StepObserver<T> for NoObserver {
    fn observe(&mut self, _: &SolverState<T>, _: &SolverState<T>, _: &mut TraceRecord<T>) -> Result<()> {
        Ok(())
    }
}

/// How the per-step stopping measure is formed.
#[derive(Debug, Clone, Copy)]
enum Measure<T> {
    /// `max{rx, ‖Δy‖ + κ rx, rz}`
    Surrogate { kappa: T },
    /// `max{rx / c, ‖Δy‖ / α}`: GDA has neither a smoothing center nor a
    /// finite κ, so its displacements are normalized by the step sizes.
    GradientMapping { c: T, alpha: T },
}

fn measure_for<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    params: &SolverParams<T>,
) -> Result<Measure<T>> {
    match algorithm {
        Algorithm::Gda => Ok(Measure::GradientMapping { c: params.c, alpha: params.alpha }),
        _ => {
            let k = constants(problem.lipschitz(), params.p, params.c, params.alpha, params.blocks)?;
            Ok(Measure::Surrogate { kappa: k.kappa })
        }
    }
}

fn scaled<T: Real>(r: T, step: T) -> T {
    if step > T::zero() {
        r / step
    } else {
        T::zero()
    }
}

/// Iterates `algorithm` from `initial` until the stopping measure drops to
/// `stop.tol` or `stop.max_iter` iterations have run.
pub fn run<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    params: &SolverParams<T>,
    initial: SolverState<T>,
    stop: StopRule<T>,
    options: RecordOptions,
) -> Result<RunOutcome<T>> {
    run_observed(problem, algorithm, params, initial, stop, options, &mut NoObserver)
}

/// [`run`] with an observer called on every recorded step.
///
/// Configuration problems are returned as `Err`; numerical failures during
/// the iteration end the run early and are reported in the outcome together
/// with the trace up to the last valid step.
#[allow(clippy::too_many_arguments)]
pub fn run_observed<T: Real, P: MinMaxProblem<T> + ?Sized, O: StepObserver<T> + ?Sized>(
    problem: &P,
    algorithm: Algorithm,
    params: &SolverParams<T>,
    initial: SolverState<T>,
    stop: StopRule<T>,
    options: RecordOptions,
    observer: &mut O,
) -> Result<RunOutcome<T>> {
    params.validate()?;
    if options.stride == 0 {
        return Err(Error::Config("record stride must be at least 1".into()));
    }
    if algorithm == Algorithm::SmoothedBgda && problem.blocks().is_none() {
        return Err(Error::Config("smoothed-bgda requires a declared block structure".into()));
    }
    let tol_x = T::lit(1e-12);
    if !problem.x_set().contains(&initial.x, tol_x) || !problem.y_set().contains(&initial.y, tol_x) {
        return Err(Error::Precondition("initial state is not feasible".into()));
    }
    let measure = measure_for(problem, algorithm, params)?;
    let meta = TraceMeta {
        problem_id: String::new(),
        algorithm: Some(algorithm),
        params: Some(*params),
        seed: None,
    };
    let mut trace = IterateTrace::new(meta);
    let started = Instant::now();
    let mut state = initial;
    let mut previous = None;
    let mut final_measure = None;

    let abort = |trace, state, previous, final_measure, err: Error| {
        let stop = match err {
            Error::RegionViolation { .. } => StopReason::RegionViolation,
            _ => StopReason::Diverged,
        };
        Ok(RunOutcome { trace, state, previous, stop, error: Some(err), final_measure })
    };

    for _ in 0..stop.max_iter {
        let next = match step(problem, algorithm, &state, params) {
            Ok(next) => next,
            Err(err) => return abort(trace, state, previous, final_measure, err),
        };
        let rx = dist(&state.x, &next.x);
        let dy = dist(&state.y, &next.y);
        let (ry, kind, rz, value) = match measure {
            Measure::Surrogate { kappa } => {
                let ry = dy + kappa * rx;
                let rz = dist(&next.x, &state.z);
                (ry, ResidualKind::Surrogate, rz, rx.max(ry).max(rz))
            }
            Measure::GradientMapping { c, alpha } => {
                (dy, ResidualKind::Step, T::zero(), scaled(rx, c).max(scaled(dy, alpha)))
            }
        };
        if !value.is_finite() {
            return abort(trace, state, previous, final_measure, Error::NonFinite { t: next.t });
        }
        final_measure = Some(value);
        let done = value <= stop.tol;
        let last = done || next.t >= stop.max_iter;
        if next.t % options.stride == 0 || last {
            let f = match checked_value(problem, &next.x, &next.y) {
                Ok(f) => f,
                Err(err) => return abort(trace, state, previous, final_measure, err),
            };
            let mut record = TraceRecord {
                t: next.t,
                rx,
                ry,
                ry_kind: kind,
                rz,
                measure: value,
                f,
                psi: if options.psi { problem.psi(&next.x) } else { None },
                phi: None,
                wall_ns: options.wall_clock.then(|| started.elapsed().as_nanos() as u64),
            };
            if let Err(err) = observer.observe(&state, &next, &mut record) {
                return abort(trace, state, previous, final_measure, err);
            }
            trace.push(record)?;
        }
        previous = Some(std::mem::replace(&mut state, next));
        if done {
            return Ok(RunOutcome {
                trace,
                state,
                previous,
                stop: StopReason::TolReached,
                error: None,
                final_measure,
            });
        }
    }
    Ok(RunOutcome { trace, state, previous, stop: StopReason::MaxIter, error: None, final_measure })
}
