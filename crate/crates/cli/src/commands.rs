use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use smoothgda::diagnostics::fit_rate;
use smoothgda::state::TraceMeta;
use smoothgda::{Algorithm, Params, StopReason, Trace};

use crate::config::{ExperimentConfig, Horizon, ProblemSpec};
use crate::error::CliError;
use crate::output::{ensure_dir, write_json, write_run, write_text};
use crate::session::{best_so_far, execute, Session};
use crate::svg::{log_log, thin, Series};

const CURVE_POINTS_PER_DECADE: usize = 50;
const LOWEST_DECADE: i32 = -16;

fn curve_points(session: &Session) -> Vec<(f64, f64)> {
    best_so_far(&session.outcome.trace).into_iter().map(|(t, b)| (t as f64, b)).collect()
}

fn residual_plot(session: &Session) -> String {
    let measure: Vec<(f64, f64)> =
        session.outcome.trace.records().iter().map(|r| (r.t as f64, r.measure)).collect();
    log_log(
        &format!("{} on {}", session.config.algorithm, session.problem_id),
        "iteration t",
        "stopping measure",
        &[
            Series { label: "measure", points: thin(&measure, 200) },
            Series { label: "best so far", points: thin(&curve_points(session), 200) },
        ],
    )
}

pub fn cmd_run(config: &ExperimentConfig, out: &Path, svg: bool) -> Result<(), CliError> {
    let session = execute(config)?;
    write_run(out, &session)?;
    if svg {
        // plotting problems must not change the outcome of the run
        if let Err(e) = write_text(&out.join("residuals.svg"), &residual_plot(&session)) {
            eprintln!("warning: {e}");
        }
    }
    session.status()
}

#[derive(Debug, Serialize)]
pub struct DecadeHit {
    pub threshold: f64,
    /// First recorded iteration whose best-so-far measure is at or below
    /// `threshold`; `null` if never reached.
    pub t: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Checkpoint {
    pub t: usize,
    pub best: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareRun {
    pub label: &'static str,
    pub algorithm: Algorithm,
    pub params: Params,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub final_measure: Option<f64>,
    pub min_measure: Option<f64>,
    pub decades: Vec<DecadeHit>,
    /// Best-so-far value at `t = 10^k`.
    pub checkpoints: Vec<Checkpoint>,
    /// Best-so-far curve, thinned on a logarithmic grid in `t`.
    pub curve: Vec<(usize, f64)>,
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub problem_id: String,
    pub seed: u64,
    pub horizon: Horizon,
    pub identical_curves: bool,
    pub runs: Vec<CompareRun>,
}

pub fn decade_hits(curve: &[(usize, f64)]) -> Vec<DecadeHit> {
    let Some(&(_, first)) = curve.first() else { return Vec::new() };
    let top = if first > 0.0 && first.is_finite() { first.log10().ceil() as i32 } else { 0 };
    (LOWEST_DECADE..=top)
        .rev()
        .map(|k| {
            let threshold = 10f64.powi(k);
            DecadeHit { threshold, t: curve.iter().find(|&&(_, b)| b <= threshold).map(|&(t, _)| t) }
        })
        .collect()
}

pub fn checkpoints(curve: &[(usize, f64)]) -> Vec<Checkpoint> {
    let Some(&(last_t, _)) = curve.last() else { return Vec::new() };
    let mut out = Vec::new();
    let mut t = 1usize;
    while t <= last_t {
        if let Some(&(_, best)) = curve.iter().take_while(|&&(s, _)| s <= t).last() {
            out.push(Checkpoint { t, best });
        }
        t = t.saturating_mul(10);
    }
    out
}

fn compare_run(label: &'static str, session: &Session) -> CompareRun {
    let curve = best_so_far(&session.outcome.trace);
    let pts: Vec<(f64, f64)> = curve.iter().map(|&(t, b)| (t as f64, b)).collect();
    CompareRun {
        label,
        algorithm: session.config.algorithm,
        params: session.params,
        stop_reason: session.outcome.stop,
        iterations: session.outcome.state.t,
        final_measure: session.outcome.final_measure,
        min_measure: curve.last().map(|&(_, b)| b).filter(|b| b.is_finite()),
        decades: decade_hits(&curve),
        checkpoints: checkpoints(&curve),
        curve: thin(&pts, CURVE_POINTS_PER_DECADE).into_iter().map(|(t, b)| (t as usize, b)).collect(),
    }
}

/// Runs two configurations on the same problem and horizon and records
/// their best-so-far curves side by side. Divergence of either run is a
/// finding, not a failure of the command.
pub fn cmd_compare(a: &ExperimentConfig, b: &ExperimentConfig, out: &Path) -> Result<(), CliError> {
    if a.problem != b.problem {
        return Err(CliError::Config("invalid field `problem`: the two configs use different problems".into()));
    }
    if a.seed != b.seed {
        return Err(CliError::Config("invalid field `seed`: the two configs use different seeds".into()));
    }
    if a.horizon != b.horizon {
        return Err(CliError::Config("invalid field `horizon`: the two configs use different horizons".into()));
    }
    let (sa, sb) = rayon::join(|| execute(a), || execute(b));
    let (sa, sb) = (sa?, sb?);
    ensure_dir(out)?;
    write_run(&out.join("a"), &sa)?;
    write_run(&out.join("b"), &sb)?;
    let (ca, cb) = (best_so_far(&sa.outcome.trace), best_so_far(&sb.outcome.trace));
    let cmp = Comparison {
        problem_id: sa.problem_id.clone(),
        seed: a.seed,
        horizon: a.horizon,
        identical_curves: ca == cb,
        runs: vec![compare_run("a", &sa), compare_run("b", &sb)],
    };
    write_json(&out.join("comparison.json"), &cmp)?;
    let la = format!("a: {}", a.algorithm);
    let lb = format!("b: {}", b.algorithm);
    let svg = log_log(
        &format!("best-so-far measure on {}", sa.problem_id),
        "iteration t",
        "best stopping measure",
        &[
            Series { label: &la, points: thin(&curve_points(&sa), 200) },
            Series { label: &lb, points: thin(&curve_points(&sb), 200) },
        ],
    );
    if let Err(e) = write_text(&out.join("comparison.svg"), &svg) {
        eprintln!("warning: {e}");
    }
    Ok(())
}

/// Parses `0-9`, `1,4,7` or a mix such as `0-3,8`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, CliError> {
    let bad = |part: &str| CliError::Config(format!("invalid field `--seeds`: cannot parse `{part}`"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: u64 = lo.trim().parse().map_err(|_| bad(part))?;
                let hi: u64 = hi.trim().parse().map_err(|_| bad(part))?;
                if hi < lo {
                    return Err(bad(part));
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(part.parse().map_err(|_| bad(part))?),
        }
    }
    let mut seen = std::collections::HashSet::new();
    seeds.retain(|s| seen.insert(*s));
    Ok(seeds)
}

pub fn parse_window(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("invalid field `--window`: expected `lo,hi`, got `{text}`"));
    let (lo, hi) = text.split_once(',').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo == 0 || hi <= lo {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[derive(Debug, Serialize)]
pub struct SeedRate {
    pub seed: u64,
    pub slope: Option<f64>,
    /// Why the seed was left out of the statistics.
    pub excluded: Option<String>,
    pub stop_reason: Option<StopReason>,
    pub iterations: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct RateReport {
    pub window: (usize, usize),
    pub seeds: Vec<SeedRate>,
    pub included: usize,
    pub mean_slope: Option<f64>,
    /// Sample standard deviation; 0 with a single included seed.
    pub std_slope: Option<f64>,
}

fn rate_one(config: &ExperimentConfig, seed: u64, window: (usize, usize), out: &Path) -> Result<SeedRate, CliError> {
    let mut cfg = config.clone();
    cfg.seed = seed;
    let excluded = |why: String, stop, iterations| SeedRate { seed, slope: None, excluded: Some(why), stop_reason: stop, iterations };
    if let ProblemSpec::SyntheticPowerLaw { exponent } = cfg.problem {
        let r: Vec<f64> = (1..=cfg.horizon.max_iter).map(|t| (t as f64).powf(-exponent)).collect();
        let trace = Trace::from_measures(TraceMeta { seed: Some(seed), ..TraceMeta::default() }, &r);
        ensure_dir(out)?;
        write_text(&out.join("trace.csv"), &crate::output::trace_csv(&trace))?;
        return Ok(match fit_rate(&trace, window) {
            Ok(s) => SeedRate { seed, slope: Some(s), excluded: None, stop_reason: None, iterations: Some(r.len()) },
            Err(e) => excluded(e.to_string(), None, Some(r.len())),
        });
    }
    let session = match execute(&cfg) {
        Ok(s) => s,
        Err(CliError::Numerical(msg)) => return Ok(excluded(format!("assumption check failed: {msg}"), None, None)),
        Err(e) => return Err(e),
    };
    write_run(out, &session)?;
    let stop = session.outcome.stop;
    let iters = Some(session.outcome.state.t);
    if !stop.is_clean() {
        return Ok(excluded(stop.name().to_string(), Some(stop), iters));
    }
    Ok(match fit_rate(&session.outcome.trace, window) {
        Ok(s) => SeedRate { seed, slope: Some(s), excluded: None, stop_reason: Some(stop), iterations: iters },
        Err(e) => excluded(e.to_string(), Some(stop), iters),
    })
}

/// Fits the empirical rate for each seed in parallel. Succeeds when at least
/// one seed yields a slope.
pub fn cmd_rate(config: &ExperimentConfig, seeds: &[u64], window: (usize, usize), out: &Path) -> Result<(), CliError> {
    if seeds.len() < 3 {
        return Err(CliError::Config(format!("invalid field `--seeds`: need at least 3 seeds, got {}", seeds.len())));
    }
    ensure_dir(out)?;
    let rows = seeds
        .par_iter()
        .map(|&s| rate_one(config, s, window, &out.join(format!("seed-{s}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let slopes: Vec<f64> = rows.iter().filter_map(|r| r.slope).collect();
    let n = slopes.len();
    let mean = (n > 0).then(|| slopes.iter().sum::<f64>() / n as f64);
    let std = mean.map(|m| {
        if n < 2 {
            0.0
        } else {
            (slopes.iter().map(|s| (s - m) * (s - m)).sum::<f64>() / (n - 1) as f64).sqrt()
        }
    });
    let report = RateReport { window, seeds: rows, included: n, mean_slope: mean, std_slope: std };
    write_json(&out.join("rate.json"), &report)?;
    if n == 0 {
        return Err(CliError::Numerical("no seed produced a usable slope".into()));
    }
    Ok(())
}
