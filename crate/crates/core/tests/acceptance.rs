#![allow(clippy::single_range_in_vec_init)]

//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 regardless of outcome so the workspace test run reports the
//! criteria without aborting; set `ACCEPTANCE_STRICT=1` to exit 1 on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use rand::Rng;
use smoothgda::diagnostics::{
    check_sufficient_decrease, constants, error_bound_ratio, fit_rate, y_plus, DiagnosticsObserver,
};
use smoothgda::linalg::dist;
use smoothgda::problem::{check_gradients, even_blocks, Blocked};
use smoothgda::problems::{
    check_regularity, check_strict_complementarity, hand_three_component, hand_two_component,
    kkt_residual, make_bilinear, make_finite_max_quadratic, GeneratorSpec, DEFAULT_SUPPORT_TOL,
    DEFAULT_TIE_TOL,
};
use smoothgda::solvers::{certificate, smoothed_bgda_step, smoothed_gda_step, StepObserver};
use smoothgda::{
    derive_params, project_simplex, run, run_observed, Algorithm, Mat, MinMaxProblem, Params,
    RecordOptions, Record, Set, State, StopReason, StopRule,
};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

const RATE_SEEDS: u64 = 10;
const RATE_WINDOW: (usize, usize) = (1_000, 100_000);
const RATE_BAND: (f64, f64) = (-0.65, -0.35);

fn rate_instance(seed: u64) -> smoothgda::FiniteMax {
    make_finite_max_quadratic(20, 5, seed, &GeneratorSpec::targeted()).expect("targeted instance")
}

fn uniform_start(p: &smoothgda::FiniteMax) -> State {
    let m = p.num_components();
    State::initial(p, &vec![0.0; p.dim_x()], &vec![1.0 / m as f64; m], None).unwrap()
}

fn criterion_rate() -> Verdict {
    let results: Vec<(f64, Duration)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..RATE_SEEDS)
            .map(|seed| {
                s.spawn(move || {
                    let started = Instant::now();
                    let p = rate_instance(seed);
                    let prm = derive_params(p.lipschitz(), 1, 0.99);
                    let stop = StopRule { max_iter: RATE_WINDOW.1, tol: 0.0 };
                    let out = run(&p, Algorithm::SmoothedGda, &prm, uniform_start(&p), stop, RecordOptions::default())
                        .unwrap();
                    let slope = fit_rate(&out.trace, RATE_WINDOW).unwrap();
                    (slope, started.elapsed())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let in_band = results.iter().filter(|(s, _)| *s >= RATE_BAND.0 && *s <= RATE_BAND.1).count();
    let slowest = results.iter().map(|r| r.1).max().unwrap();
    let slopes: Vec<String> = results.iter().map(|(s, _)| format!("{s:.3}")).collect();
    verdict(
        in_band >= 8 && slowest <= Duration::from_secs(60),
        format!("{in_band}/10 slopes in [-0.65, -0.35]: [{}]; slowest instance {slowest:.1?}", slopes.join(", ")),
    )
}

fn criterion_oscillation() -> Verdict {
    let p = scalar_bilinear();
    let gda = Params::new(0.0, 0.1, 0.1, 1.0);
    let start = State::initial(&p, &[1.0], &[1.0], None).unwrap();
    let out = run(&p, Algorithm::Gda, &gda, start, StopRule { max_iter: 10_000, tol: 0.5 }, RecordOptions::default())
        .unwrap();
    let gda_best = out.trace.records().iter().map(|r| r.measure).fold(f64::INFINITY, f64::min);
    let prm = derive_params(p.lipschitz(), 1, 0.99);
    let start = State::initial(&p, &[1.0], &[1.0], Some(&[1.0])).unwrap();
    let smooth = run(
        &p,
        Algorithm::SmoothedGda,
        &prm,
        start,
        StopRule { max_iter: 1_000_000, tol: 1e-6 },
        RecordOptions { stride: 1000, ..Default::default() },
    )
    .unwrap();
    verdict(
        gda_best > 0.5 && smooth.stop == StopReason::TolReached,
        format!(
            "GDA best measure {gda_best:.3} over 1e4 steps; Smoothed-GDA {} at t={}",
            smooth.stop.name(),
            smooth.state.t
        ),
    )
}

/// Records the worst violation of `‖yᵗ⁺¹ − y₊(yᵗ, zᵗ)‖ ≤ κ‖xᵗ − xᵗ⁺¹‖`.
struct KappaProbe<'a, P: ?Sized> {
    inner: DiagnosticsObserver<'a, f64, P>,
    problem: &'a P,
    params: Params,
    kappa: f64,
    worst: f64,
}

impl<P: MinMaxProblem<f64> + ?Sized> StepObserver<f64> for KappaProbe<'_, P> {
    fn observe(&mut self, prev: &State, next: &State, record: &mut Record) -> smoothgda::Result<()> {
        self.inner.observe(prev, next, record)?;
        let yp = y_plus(self.problem, &prev.y, &prev.z, self.params.p, self.params.alpha, 1e-12)?;
        let excess = dist(&next.y, &yp) - self.kappa * dist(&prev.x, &next.x);
        self.worst = self.worst.max(excess);
        Ok(())
    }
}

struct HandRun {
    phi_gap: f64,
    min_margin: f64,
    kappa_excess: f64,
}

fn hand_runs() -> Vec<(&'static str, HandRun)> {
    let cases = [("hand-2 far", 0usize, 3.0), ("hand-2 near", 0, 0.05), ("hand-3 far", 1, -2.0), ("hand-3 near", 1, 0.1)];
    cases
        .into_iter()
        .map(|(name, which, x0)| {
            let (p, value) = if which == 0 {
                (hand_two_component::<f64>().unwrap(), 1.0)
            } else {
                (hand_three_component::<f64>().unwrap(), 10.0)
            };
            let prm = derive_params(p.lipschitz(), 1, 0.99);
            let m = p.num_components();
            let start = State::initial(&p, &[x0], &vec![1.0 / m as f64; m], None).unwrap();
            let kappa = constants(p.lipschitz(), prm.p, prm.c, prm.alpha, 1).unwrap().kappa;
            let mut probe = KappaProbe {
                inner: DiagnosticsObserver::new(&p, prm, 1e-10).exact_every(1).potential_every(1),
                problem: &p,
                params: prm,
                kappa,
                worst: f64::NEG_INFINITY,
            };
            let out = run_observed(
                &p,
                Algorithm::SmoothedGda,
                &prm,
                start,
                StopRule { max_iter: 20_000, tol: 0.0 },
                RecordOptions::default(),
                &mut probe,
            )
            .unwrap();
            let min_phi = out.trace.records().iter().filter_map(|r| r.phi).fold(f64::INFINITY, f64::min);
            let report = check_sufficient_decrease(&out.trace, &prm).unwrap();
            (
                name,
                HandRun {
                    phi_gap: min_phi - value,
                    min_margin: report.min_margin.unwrap(),
                    kappa_excess: probe.worst,
                },
            )
        })
        .collect()
}

fn criteria_potential_and_kappa() -> (Verdict, Verdict) {
    let runs = hand_runs();
    let phi_gap = runs.iter().map(|r| r.1.phi_gap).fold(f64::INFINITY, f64::min);
    let margin = runs.iter().map(|r| r.1.min_margin).fold(f64::INFINITY, f64::min);
    let excess = runs.iter().map(|r| r.1.kappa_excess).fold(f64::NEG_INFINITY, f64::max);
    (
        verdict(
            phi_gap >= -1e-6 && margin >= -1e-6,
            format!("min(phi - minmax value) = {phi_gap:.3e}, min decrease margin = {margin:.3e} over {} runs", runs.len()),
        ),
        verdict(excess <= 2e-10, format!("worst excess over kappa*rx = {excess:.3e}")),
    )
}

fn criterion_certificate() -> Verdict {
    let hand: Shared = std::sync::Arc::new(hand_two_component::<f64>().unwrap());
    let cases: Vec<(&str, Shared, Vec<f64>, Vec<f64>)> = vec![
        ("scalar-bilinear", std::sync::Arc::new(scalar_bilinear()), vec![1.0], vec![1.0]),
        ("box-simplex-bilinear", std::sync::Arc::new(box_simplex_bilinear()), vec![1.0, -1.0], vec![1.0, 0.0, 0.0]),
        ("hand-2", hand, vec![0.01], vec![0.5, 0.5]),
    ];
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, p, x0, y0) in &cases {
        let prm = derive_params(p.lipschitz(), 1, 0.99);
        for eps in [1e-3, 1e-4] {
            let start = State::initial(p.as_ref(), x0, y0, None).unwrap();
            let out = run(
                p.as_ref(),
                Algorithm::SmoothedGda,
                &prm,
                start,
                StopRule { max_iter: 5_000_000, tol: eps },
                RecordOptions { stride: 10_000, ..Default::default() },
            )
            .unwrap();
            let Some(prev) = out.previous.as_ref().filter(|_| out.stop == StopReason::TolReached) else {
                failures.push(format!("{name} did not reach {eps:e}"));
                continue;
            };
            let next = &out.state;
            let ry = dist(&prev.y, &y_plus(p.as_ref(), &prev.y, &prev.z, prm.p, prm.alpha, 1e-12).unwrap());
            let exact = dist(&prev.x, &next.x).max(ry).max(dist(&prev.z, &next.x));
            let cert = certificate(p.as_ref(), prev, next, &prm).unwrap();
            worst = worst.max(cert.u_norm.max(cert.v_norm) / (cert.lambda_bar * exact));
            if exact > eps || !cert.within(exact, 1e-12) {
                failures.push(format!("{name} at {eps:e}: exact {exact:.2e}, u {:.2e}, v {:.2e}", cert.u_norm, cert.v_norm));
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("6 stops; worst max(|u|,|v|)/(lambda_bar*eps) = {worst:.3e}")
        } else {
            failures.join("; ")
        },
    )
}

fn criterion_simplex() -> Verdict {
    let mut rng = rng(6);
    let mut worst = 0.0f64;
    for d in 2..=6 {
        for k in 0..1000 {
            let scale = [0.1, 1.0, 10.0][k % 3];
            let v: Vec<f64> = (0..d).map(|_| scale * (rng.random::<f64>() * 2.0 - 1.0)).collect();
            let got = project_simplex(&v).unwrap();
            let want = qp_simplex_oracle(&v);
            worst = worst.max(got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
    }
    verdict(worst <= 1e-10, format!("max deviation from the QP oracle {worst:.2e} over 5000 inputs"))
}

fn criterion_blocks() -> Verdict {
    let instances: Vec<(&str, Shared)> = shipped_problems()
        .into_iter()
        .filter(|(name, _)| ["scalar-bilinear", "box-simplex-bilinear", "hand-2", "hand-3", "finite-max"].contains(name))
        .collect();
    let mut worst = 0.0f64;
    for (_, p) in &instances {
        let n = p.dim_x();
        let blocked = Blocked::new(p.clone(), vec![0..n]).unwrap();
        let prm = derive_params(p.lipschitz(), 1, 0.99);
        let mut rng = rng(7);
        let x0 = sample_x(p.as_ref(), &mut rng);
        let y0 = sample_y(p.as_ref(), &mut rng);
        let mut a = State::initial(p.as_ref(), &x0, &y0, None).unwrap();
        let mut b = a.clone();
        for _ in 0..1000 {
            a = smoothed_gda_step(p.as_ref(), &a, &prm).unwrap();
            b = smoothed_bgda_step(&blocked, &b, &prm).unwrap();
            for (u, v) in [(&a.x, &b.x), (&a.y, &b.y), (&a.z, &b.z)] {
                worst = worst.max(u.iter().zip(v.iter()).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max));
            }
        }
    }
    let game = make_bilinear(Mat::identity(4), vec![0.0; 4], vec![0.0; 4], Set::whole_space(4), Set::cube(4, -1.0, 1.0).unwrap())
        .unwrap();
    let p = Blocked::new(game, even_blocks(4, 4)).unwrap();
    let prm = derive_params(p.lipschitz(), 4, 0.99);
    let start = State::initial(&p, &[1.0; 4], &[1.0; 4], None).unwrap();
    let out = run(
        &p,
        Algorithm::SmoothedBgda,
        &prm,
        start,
        StopRule { max_iter: 1_000_000, tol: 1e-4 },
        RecordOptions { stride: 1000, ..Default::default() },
    )
    .unwrap();
    let feasible = p.x_set().contains(&out.state.x, 0.0) && p.y_set().contains(&out.state.y, 1e-15);
    verdict(
        worst <= 1e-12 && out.stop == StopReason::TolReached && feasible && prm.is_theory_compliant(p.lipschitz()),
        format!("N=1 max deviation {worst:.1e} on 5 instances; N=4 {} at t={}", out.stop.name(), out.state.t),
    )
}

fn criterion_kkt() -> Verdict {
    let two = hand_two_component::<f64>().unwrap();
    let three = hand_three_component::<f64>().unwrap();
    let r2 = kkt_residual(&two, &[0.0], &[0.5, 0.5], DEFAULT_TIE_TOL, DEFAULT_SUPPORT_TOL).unwrap();
    let r3 = kkt_residual(&three, &[0.0], &[0.0, 0.0, 1.0], DEFAULT_TIE_TOL, DEFAULT_SUPPORT_TOL).unwrap();
    let level = r2.level().max(r3.level());
    let gamma = check_regularity(&two, &[0.0], DEFAULT_TIE_TOL).unwrap();
    let gap = check_strict_complementarity(&three, &[0.0], &[0.0, 0.0, 1.0], 1e-12).unwrap();
    verdict(
        level <= 1e-12 && (gamma - 2f64.sqrt()).abs() <= 1e-10 && (gap - 9.0).abs() <= 1e-10,
        format!("KKT level {level:.1e}, gamma {gamma:.12}, gap {gap}"),
    )
}

/// Error-bound probes every `every` steps of a Smoothed-GDA run.
struct BoundProbe<'a> {
    problem: &'a smoothgda::FiniteMax,
    params: Params,
    every: usize,
    max_ratio: f64,
    infinite_in_regime: usize,
    weak_violations: usize,
    probes: usize,
}

impl StepObserver<f64> for BoundProbe<'_> {
    fn observe(&mut self, prev: &State, next: &State, _record: &mut Record) -> smoothgda::Result<()> {
        if !next.t.is_multiple_of(self.every) {
            return Ok(());
        }
        let (p, alpha) = (self.params.p, self.params.alpha);
        let probe = error_bound_ratio(self.problem, &prev.y, &prev.z, p, alpha, 1e-10)?;
        let ry = dist(&prev.y, &y_plus(self.problem, &prev.y, &prev.z, p, alpha, 1e-10)?);
        let exact = dist(&prev.x, &next.x).max(ry).max(dist(&prev.z, &next.x));
        self.probes += 1;
        if probe.ratio.is_finite() {
            self.max_ratio = self.max_ratio.max(probe.ratio);
        } else if exact < 1e-2 {
            self.infinite_in_regime += 1;
        }
        if !probe.weak_bound_holds(1e-8) {
            self.weak_violations += 1;
        }
        Ok(())
    }
}

fn criterion_error_bound() -> Verdict {
    let results: Vec<(f64, usize, usize, usize)> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..RATE_SEEDS)
            .map(|seed| {
                s.spawn(move || {
                    let p = rate_instance(seed);
                    let prm = derive_params(p.lipschitz(), 1, 0.99);
                    let mut probe = BoundProbe {
                        problem: &p,
                        params: prm,
                        every: 1000,
                        max_ratio: 0.0,
                        infinite_in_regime: 0,
                        weak_violations: 0,
                        probes: 0,
                    };
                    run_observed(
                        &p,
                        Algorithm::SmoothedGda,
                        &prm,
                        uniform_start(&p),
                        StopRule { max_iter: 20_000, tol: 0.0 },
                        RecordOptions::default(),
                        &mut probe,
                    )
                    .unwrap();
                    (probe.max_ratio, probe.infinite_in_regime, probe.weak_violations, probe.probes)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let infinite: usize = results.iter().map(|r| r.1).sum();
    let violations: usize = results.iter().map(|r| r.2).sum();
    let probes: usize = results.iter().map(|r| r.3).sum();
    let caps: Vec<String> = results.iter().map(|r| format!("{:.1}", r.0)).collect();
    verdict(
        infinite == 0 && violations == 0,
        format!(
            "{probes} probes, {infinite} infinite ratios in regime, {violations} weak-bound violations; max ratio per seed [{}]",
            caps.join(", ")
        ),
    )
}

fn criterion_gradients_and_sigmas() -> Verdict {
    let mut worst_grad = 0.0f64;
    for (_, p) in shipped_problems() {
        let mut rng = rng(10);
        for _ in 0..100 {
            let x = sample_x(p.as_ref(), &mut rng);
            let y = sample_y(p.as_ref(), &mut rng);
            worst_grad = worst_grad.max(check_gradients(p.as_ref(), &x, &y, 1e-6).unwrap());
        }
    }
    let slack = 1e-8;
    let mut worst_sigma = f64::NEG_INFINITY;
    for (name, p) in shipped_problems() {
        if !["scalar-bilinear", "box-simplex-bilinear", "hand-2", "hand-3", "finite-max"].contains(&name) {
            continue;
        }
        let prm = derive_params(p.lipschitz(), 1, 0.99);
        let k = constants(p.lipschitz(), prm.p, prm.c, prm.alpha, 1).unwrap();
        let mut rng = rng(11);
        for _ in 0..100 {
            let worst = sigma_excess(p.as_ref(), &prm, &k, &mut rng);
            worst_sigma = worst_sigma.max(worst - slack);
        }
    }
    verdict(
        worst_grad <= 1e-6 && worst_sigma <= 0.0,
        format!("worst gradient deviation {worst_grad:.2e}; worst sigma/L_d excess beyond slack {worst_sigma:.2e}"),
    )
}

/// Largest excess of the sampled σ₁, σ₂ and `L_d` Lipschitz ratios over
/// their bounds at one random pair.
fn sigma_excess(
    p: &dyn MinMaxProblem<f64>,
    prm: &Params,
    k: &smoothgda::Constants,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> f64 {
    use smoothgda::diagnostics::{dual_gradient, solve_x_of_yz};
    let tol = 1e-12;
    let (y, y2) = (sample_y(p, rng), sample_y(p, rng));
    let (z, z2) = (sample_x(p, rng), sample_x(p, rng));
    let x_yz = solve_x_of_yz(p, &y, &z, prm.p, tol).unwrap();
    let x_yz2 = solve_x_of_yz(p, &y, &z2, prm.p, tol).unwrap();
    let x_y2z = solve_x_of_yz(p, &y2, &z, prm.p, tol).unwrap();
    let (g, _) = dual_gradient(p, &y, &z, prm.p, tol, &x_yz).unwrap();
    let (g2, _) = dual_gradient(p, &y2, &z, prm.p, tol, &x_y2z).unwrap();
    let dy = dist(&y, &y2);
    [
        dist(&x_yz, &x_yz2) - k.sigma1 * dist(&z, &z2),
        dist(&x_yz, &x_y2z) - k.sigma2 * dy,
        dist(&g, &g2) - k.l_d * dy,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

fn main() {
    let started = Instant::now();
    let mut verdicts: Vec<(u32, &str, Verdict)> = std::thread::scope(|s| {
        let rate = s.spawn(criterion_rate);
        let bound = s.spawn(criterion_error_bound);
        let hand = s.spawn(criteria_potential_and_kappa);
        let cert = s.spawn(criterion_certificate);
        let blocks = s.spawn(criterion_blocks);
        let rest = vec![
            (2, "GDA oscillation separation", criterion_oscillation()),
            (6, "simplex projection oracle", criterion_simplex()),
            (8, "hand-solved KKT checks", criterion_kkt()),
            (10, "gradient and sigma-bound suites", criterion_gradients_and_sigmas()),
        ];
        let (potential, kappa) = hand.join().unwrap();
        let mut all = vec![
            (1, "rate slope on finite-max instances", rate.join().unwrap()),
            (3, "potential lower bound and sufficient decrease", potential),
            (4, "kappa inequality", kappa),
            (5, "certificate soundness", cert.join().unwrap()),
            (7, "multi-block reduction", blocks.join().unwrap()),
            (9, "error-bound probes", bound.join().unwrap()),
        ];
        all.extend(rest);
        all
    });
    verdicts.sort_by_key(|v| v.0);
    let passed = verdicts.iter().filter(|v| v.2.pass).count();
    for (id, name, v) in &verdicts {
        println!("{} [{id:>2}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{passed}/{} criteria passed in {:.1?}", verdicts.len(), started.elapsed());
    if passed < verdicts.len() && std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
