//! Random points in feasible sets and regions, used by audits and tests.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::problem::Region;
use crate::projections::FeasibleSet;
use crate::scalar::Real;

fn uniform_or_normal<T: Real, R: Rng + ?Sized>(lo: T, hi: T, rng: &mut R) -> T {
    if lo.is_finite() && hi.is_finite() {
        lo + (hi - lo) * T::lit(rng.random::<f64>())
    } else {
        let z: f64 = StandardNormal.sample(rng);
        T::lit(z).max(lo).min(hi)
    }
}

/// Uniform point in a bounded region; unbounded coordinates are drawn from a
/// standard normal clipped to the region.
pub fn sample_in_region<T: Real, R: Rng + ?Sized>(region: &Region<T>, rng: &mut R) -> Vec<T> {
    region
        .lo()
        .iter()
        .zip(region.hi())
        .map(|(&l, &h)| uniform_or_normal(l, h, rng))
        .collect()
}

/// Random point of a feasible set.
pub fn sample_in_set<T: Real, R: Rng + ?Sized>(set: &FeasibleSet<T>, rng: &mut R) -> Vec<T> {
    match set {
        FeasibleSet::WholeSpace { dim } => (0..*dim)
            .map(|_| T::lit(StandardNormal.sample(rng)))
            .collect(),
        FeasibleSet::Box { lo, hi } => lo
            .iter()
            .zip(hi)
            .map(|(&l, &h)| uniform_or_normal(l, h, rng))
            .collect(),
        FeasibleSet::L2Ball { center, radius } => {
            let d = center.len();
            let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let r = radius.as_f64() * rng.random::<f64>().powf(1.0 / d.max(1) as f64);
            center
                .iter()
                .zip(&dir)
                .map(|(&c, &u)| c + T::lit(r * u / len))
                .collect()
        }
        FeasibleSet::Simplex { dim } => {
            // flat Dirichlet via normalized exponentials
            let e: Vec<f64> = (0..*dim).map(|_| Exp1.sample(rng)).collect();
            let s: f64 = e.iter().sum();
            e.iter().map(|&v| T::lit(v / s)).collect()
        }
    }
}
