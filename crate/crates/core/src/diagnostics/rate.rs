use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::IterateTrace;

const MIN_POINTS: usize = 10;

/// Least-squares slope of `log(best-so-far measure)` against `log t` over
/// records with `t_lo ≤ t ≤ t_hi`.
///
/// The best-so-far value at `t` is the minimum of the recorded stopping
/// measure over all records up to `t`. Points whose best value is zero are
/// excluded.
pub fn fit_rate<T: Real>(trace: &IterateTrace<T>, window: (usize, usize)) -> Result<T> {
    let (lo, hi) = window;
    let mut best = T::infinity();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for rec in trace.records() {
        if rec.measure.is_finite() {
            best = best.min(rec.measure);
        }
        if rec.t < lo || rec.t > hi {
            continue;
        }
        if best > T::zero() && best.is_finite() && rec.t > 0 {
            pts.push(((rec.t as f64).ln(), best.as_f64().ln()));
        }
    }
    if pts.len() < MIN_POINTS {
        return Err(Error::InsufficientData { usable: pts.len(), needed: MIN_POINTS });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData { usable: 1, needed: MIN_POINTS });
    }
    Ok(T::lit(sxy / sxx))
}
