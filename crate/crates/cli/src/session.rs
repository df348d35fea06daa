use serde::Serialize;
use smoothgda::diagnostics::{constants, residual_exact, DiagnosticsObserver, PotentialRecord};
use smoothgda::solvers::{certificate, with_horizon};
use smoothgda::{
    derive_params, run, run_observed, Algorithm, Certificate, Constants, Outcome, Params,
    RecordOptions, State, StopRule,
};

use crate::config::{ExperimentConfig, ParamsSpec};
use crate::error::CliError;
use crate::problem::{build, default_start, DynProblem};

/// A finished run together with everything the summary reports.
pub struct Session {
    pub config: ExperimentConfig,
    pub problem_id: String,
    pub problem: DynProblem,
    pub params: Params,
    pub outcome: Outcome,
    pub potentials: Vec<(usize, PotentialRecord<f64>)>,
}

pub fn resolve_params(config: &ExperimentConfig, lipschitz: f64) -> Params {
    let blocks = config.blocks.unwrap_or(1);
    let params = match config.params {
        ParamsSpec::Auto { safety } => derive_params(lipschitz, blocks, safety),
        ParamsSpec::Explicit { p, c, alpha, beta } => Params::new(p, c, alpha, beta).with_blocks(blocks),
    };
    match config.theorem1_t {
        Some(t) => with_horizon(params, t),
        None => params,
    }
}

fn initial_state(config: &ExperimentConfig, problem: &DynProblem) -> Result<State, CliError> {
    let (x0, y0) = default_start(problem.as_ref());
    let state = match &config.initial {
        Some(init) => State::initial(problem, &init.x, &init.y, init.z.as_deref()),
        None => State::initial(problem, &x0, &y0, None),
    };
    state.map_err(|e| match CliError::from(e) {
        CliError::Config(msg) => CliError::Config(format!("invalid field `initial`: {msg}")),
        other => other,
    })
}

pub fn execute(config: &ExperimentConfig) -> Result<Session, CliError> {
    let built = build(config)?;
    let problem = built.problem;
    let params = resolve_params(config, problem.lipschitz());
    let initial = initial_state(config, &problem)?;
    let stop = StopRule { max_iter: config.horizon.max_iter, tol: config.horizon.tol };
    let options = RecordOptions { stride: config.stride, psi: true, wall_clock: config.wall_clock };
    let diag = config.diagnostics;
    let observed = diag.exact_every.is_some() || diag.potential_every.is_some() || diag.psi;
    if observed && config.algorithm == Algorithm::Gda {
        return Err(CliError::Config(
            "invalid field `diagnostics`: exact residuals and potentials need a smoothed algorithm".into(),
        ));
    }
    let (outcome, potentials) = if observed {
        let mut obs = DiagnosticsObserver::new(&problem, params, diag.inner_tol);
        if let Some(k) = diag.exact_every {
            obs = obs.exact_every(k);
        }
        if let Some(k) = diag.potential_every {
            obs = obs.potential_every(k);
        }
        if diag.psi {
            obs = obs.with_psi();
        }
        let out = run_observed(&problem, config.algorithm, &params, initial, stop, options, &mut obs)?;
        (out, obs.potentials().to_vec())
    } else {
        (run(&problem, config.algorithm, &params, initial, stop, options)?, Vec::new())
    };
    let mut outcome = outcome;
    outcome.trace.meta.problem_id = built.id.clone();
    outcome.trace.meta.seed = Some(config.seed);
    Ok(Session { config: config.clone(), problem_id: built.id, problem, params, outcome, potentials })
}

#[derive(Debug, Serialize)]
pub struct ExactResiduals {
    pub rx: f64,
    pub ry: f64,
    pub rz: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub problem_id: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub lipschitz: f64,
    pub weak_convexity: f64,
    pub params: Params,
    pub theory_compliant: bool,
    pub theory_violations: Vec<String>,
    /// `null` when `p ≤ L`, where the analysis constants are undefined.
    pub constants: Option<Constants>,
    pub stop_reason: smoothgda::StopReason,
    pub error: Option<String>,
    pub iterations: usize,
    pub final_measure: Option<f64>,
    pub final_state: State,
    pub certificate: Option<Certificate>,
    pub certificate_error: Option<String>,
    pub exact_residuals: Option<ExactResiduals>,
    pub exact_residuals_error: Option<String>,
    pub potentials: Vec<PotentialEntry>,
    pub horizon: crate::config::Horizon,
    pub theorem1_t: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct PotentialEntry {
    pub t: usize,
    #[serde(flatten)]
    pub record: PotentialRecord<f64>,
}

impl Session {
    pub fn summary(&self) -> Summary {
        let problem = &self.problem;
        let l = problem.lipschitz();
        let p = &self.params;
        let smoothed = self.config.algorithm != Algorithm::Gda;
        let out = &self.outcome;
        let (mut cert, mut cert_err, mut exact, mut exact_err) = (None, None, None, None);
        if let (true, Some(prev)) = (smoothed, &out.previous) {
            match certificate(problem, prev, &out.state, p) {
                Ok(c) => cert = Some(c),
                Err(e) => cert_err = Some(e.to_string()),
            }
            match residual_exact(problem, prev, &out.state, p.p, p.alpha, self.config.diagnostics.inner_tol) {
                Ok(r) => exact = Some(ExactResiduals { rx: r.rx, ry: r.ry, rz: r.rz }),
                Err(e) => exact_err = Some(e.to_string()),
            }
        }
        Summary {
            problem_id: self.problem_id.clone(),
            algorithm: self.config.algorithm,
            seed: self.config.seed,
            lipschitz: l,
            weak_convexity: problem.weak_convexity(),
            params: *p,
            theory_compliant: p.is_theory_compliant(l),
            theory_violations: p.theory_violations(l),
            constants: constants(l, p.p, p.c, p.alpha, p.blocks).ok(),
            stop_reason: out.stop,
            error: out.error.as_ref().map(|e| e.to_string()),
            iterations: out.state.t,
            final_measure: out.final_measure,
            final_state: out.state.clone(),
            certificate: cert,
            certificate_error: cert_err,
            exact_residuals: exact,
            exact_residuals_error: exact_err,
            potentials: self.potentials.iter().map(|&(t, record)| PotentialEntry { t, record }).collect(),
            horizon: self.config.horizon,
            theorem1_t: self.config.theorem1_t,
        }
    }

    /// Exit status of the run itself: clean stops succeed, divergence and
    /// region violations are numerical failures.
    pub fn status(&self) -> Result<(), CliError> {
        if self.outcome.stop.is_clean() {
            Ok(())
        } else {
            let why = self.outcome.error.as_ref().map_or_else(String::new, |e| format!(": {e}"));
            Err(CliError::Numerical(format!("run stopped with {}{why}", self.outcome.stop.name())))
        }
    }
}

/// Running minimum of the recorded stopping measure as `(t, best)` pairs.
pub fn best_so_far(trace: &smoothgda::Trace) -> Vec<(usize, f64)> {
    let mut best = f64::INFINITY;
    trace
        .records()
        .iter()
        .map(|r| {
            if r.measure.is_finite() {
                best = best.min(r.measure);
            }
            (r.t, best)
        })
        .collect()
}
