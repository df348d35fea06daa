use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::kkt::check_strict_complementarity;
use super::reference::solve_reference;
use super::{FiniteMaxProblem, Quadratic};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::Region;
use crate::projections::FeasibleSet;
use crate::scalar::Real;

/// Distribution of generated finite-max quadratic instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    /// Eigenvalues of each `A_i` are uniform on `[eig_lo, eig_hi]`.
    pub eig_lo: f64,
    pub eig_hi: f64,
    /// Standard deviation of the entries of `b_i`.
    pub linear_scale: f64,
    /// Standard deviation of `c_i`.
    pub offset_scale: f64,
    /// `X` and the operating region are `[-box_radius, box_radius]ⁿ`.
    pub box_radius: f64,
    /// Keep only instances whose reference KKT pair has a strict
    /// complementarity gap of at least `min_gap`.
    pub target_strict_complementarity: bool,
    pub min_gap: f64,
    pub max_attempts: usize,
    /// KKT level the reference solve must reach.
    pub kkt_tol: f64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            eig_lo: -0.5,
            eig_hi: 2.0,
            linear_scale: 1.0,
            offset_scale: 1.0,
            box_radius: 5.0,
            target_strict_complementarity: false,
            min_gap: 0.1,
            max_attempts: 100,
            kkt_tol: 1e-8,
        }
    }
}

impl GeneratorSpec {
    pub fn targeted() -> Self {
        GeneratorSpec { target_strict_complementarity: true, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.eig_lo, self.eig_hi, self.linear_scale, self.offset_scale, self.box_radius]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.eig_lo > self.eig_hi {
            return Err(Error::Config(format!(
                "generator eigenvalue range [{}, {}] is invalid",
                self.eig_lo, self.eig_hi
            )));
        }
        if self.linear_scale < 0.0 || self.offset_scale < 0.0 || !(self.box_radius > 0.0) {
            return Err(Error::Config("generator scales must be nonnegative and box_radius positive".into()));
        }
        if self.max_attempts == 0 || !(self.kkt_tol > 0.0) {
            return Err(Error::Config("max_attempts and kkt_tol must be positive".into()));
        }
        Ok(())
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `QΛQᵀ` with `Q` the orthogonal factor of a Gaussian matrix.
fn random_symmetric(n: usize, spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| normal(rng));
    let q = g.qr().q();
    let eig: Vec<f64> = (0..n).map(|_| rng.random_range(spec.eig_lo..=spec.eig_hi)).collect();
    let a = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eig)) * q.transpose();
    (&a + a.transpose()) * 0.5
}

fn draw<T: Real>(n: usize, m: usize, spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Result<FiniteMaxProblem<T>> {
    let quadratics = (0..m)
        .map(|_| {
            let a = Matrix::from_nalgebra(&random_symmetric(n, spec, rng));
            let b = (0..n).map(|_| T::lit(spec.linear_scale * normal(rng))).collect();
            let c = T::lit(spec.offset_scale * normal(rng));
            Quadratic::new(a, b, c)
        })
        .collect::<Result<Vec<_>>>()?;
    let r = T::lit(spec.box_radius);
    FiniteMaxProblem::from_quadratics(quadratics, FeasibleSet::cube(n, -r, r)?, Region::cube(n, -r, r)?)
}

/// Seeded random finite-max quadratic instance. Attempt `k` draws from
/// stream `k` of a ChaCha8 generator seeded with `seed`, so a seed always
/// yields the same instance.
pub fn make_finite_max_quadratic<T: Real>(
    n: usize,
    m: usize,
    seed: u64,
    spec: &GeneratorSpec,
) -> Result<FiniteMaxProblem<T>> {
    if n == 0 || m == 0 {
        return Err(Error::Domain("finite-max instances need n, m >= 1".into()));
    }
    spec.validate()?;
    let attempts = if spec.target_strict_complementarity { spec.max_attempts } else { 1 };
    for attempt in 0..attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let problem = draw::<T>(n, m, spec, &mut rng)?
            .with_id(format!("finite-max-n{n}-m{m}-s{seed}"))
            .with_seed(seed);
        if !spec.target_strict_complementarity || passes_filter(&problem, spec) {
            return Ok(problem);
        }
    }
    Err(Error::Generation { attempts })
}

fn passes_filter<T: Real>(problem: &FiniteMaxProblem<T>, spec: &GeneratorSpec) -> bool {
    let tol = T::lit(spec.kkt_tol);
    let Ok(sol) = solve_reference(problem, &vec![T::zero(); problem.n], tol, 20_000) else {
        return false;
    };
    check_strict_complementarity(problem, &sol.x, &sol.y, tol)
        .map(|gap| gap >= T::lit(spec.min_gap))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{check_gradients, MinMaxProblem};

    #[test]
    fn deterministic() {
        let spec = GeneratorSpec::default();
        let a = make_finite_max_quadratic::<f64>(4, 3, 7, &spec).unwrap();
        let b = make_finite_max_quadratic::<f64>(4, 3, 7, &spec).unwrap();
        let x = [0.3, -0.2, 0.1, 0.5];
        assert_eq!(a.values(&x), b.values(&x));
        assert_eq!(a.lipschitz(), b.lipschitz());
        let c = make_finite_max_quadratic::<f64>(4, 3, 8, &spec).unwrap();
        assert_ne!(a.values(&x), c.values(&x));
    }

    #[test]
    fn spectrum_in_range() {
        let spec = GeneratorSpec { eig_lo: -1.0, eig_hi: 3.0, ..GeneratorSpec::default() };
        let p = make_finite_max_quadratic::<f64>(5, 2, 1, &spec).unwrap();
        for c in p.components() {
            let super::super::Component::Quadratic(q) = c else { unreachable!() };
            let ev = q.matrix().symmetric_eigenvalues();
            assert!(ev[0] >= -1.0 - 1e-12 && ev[4] <= 3.0 + 1e-12);
        }
        assert!(p.weak_convexity() <= 1.0 + 1e-12);
    }

    #[test]
    fn gradients_consistent() {
        let p = make_finite_max_quadratic::<f64>(6, 4, 3, &GeneratorSpec::default()).unwrap();
        let x = [0.1, 0.2, -0.3, 0.4, 0.0, -1.0];
        let y = [0.1, 0.2, 0.3, 0.4];
        assert!(check_gradients(&p, &x, &y, 1e-5).unwrap() <= 1e-6);
    }

    #[test]
    fn invalid_range_rejected() {
        let spec = GeneratorSpec { eig_lo: 2.0, eig_hi: 1.0, ..GeneratorSpec::default() };
        assert!(matches!(make_finite_max_quadratic::<f64>(2, 2, 0, &spec), Err(Error::Config(_))));
    }
}
