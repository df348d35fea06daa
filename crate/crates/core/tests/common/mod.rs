#![allow(dead_code)]

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smoothgda::problem::FnProblem;
use smoothgda::problems::{
    hand_three_component, hand_two_component, make_bilinear, make_finite_max_quadratic,
    make_robust_regression, GeneratorSpec, RegressionMap, SmoothMap,
};
use smoothgda::sampling::{sample_in_region, sample_in_set};
use smoothgda::{Mat, MinMaxProblem, Region, Set};

pub type Shared = Arc<dyn MinMaxProblem<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Euclidean projection onto the simplex by enumerating supports: on a fixed
/// support the equality-constrained least-squares problem has a closed form,
/// and the projection is the closest feasible candidate.
pub fn qp_simplex_oracle(v: &[f64]) -> Vec<f64> {
    let d = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << d) {
        let support: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        let shift = (support.iter().map(|&i| v[i]).sum::<f64>() - 1.0) / support.len() as f64;
        let mut x = vec![0.0; d];
        for &i in &support {
            x[i] = v[i] - shift;
        }
        if x.iter().any(|&xi| xi < -1e-14) {
            continue;
        }
        let dist: f64 = x.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, x));
        }
    }
    best.expect("some support is feasible").1
}

/// `f = xy` with `X = ℝ`, `Y = [−1, 1]`: the instance on which GDA cycles.
pub fn scalar_bilinear() -> smoothgda::BilinearGame {
    make_bilinear(
        Mat::identity(1),
        vec![0.0],
        vec![0.0],
        Set::whole_space(1),
        Set::cube(1, -1.0, 1.0).unwrap(),
    )
    .unwrap()
}

/// Small bilinear game with a box `X` and simplex `Y`.
pub fn box_simplex_bilinear() -> smoothgda::BilinearGame {
    let a = Mat::from_rows(&[vec![1.0, -0.5, 0.2], vec![0.3, 0.8, -1.0]]).unwrap();
    make_bilinear(
        a,
        vec![0.1, -0.2],
        vec![0.0, 0.1, -0.1],
        Set::cube(2, -2.0, 2.0).unwrap(),
        Set::simplex(3).unwrap(),
    )
    .unwrap()
}

pub struct Cubic;

impl SmoothMap<f64> for Cubic {
    fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
        xi.iter().zip(x).map(|(a, b)| a * b.powi(3)).sum()
    }
    fn gradient(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        xi.iter().zip(x).map(|(a, b)| 3.0 * a * b * b).collect()
    }
}

pub fn small_finite_max(seed: u64) -> smoothgda::FiniteMax {
    make_finite_max_quadratic(6, 3, seed, &GeneratorSpec::default()).unwrap()
}

/// Every problem family the crate ships, one representative each.
pub fn shipped_problems() -> Vec<(&'static str, Shared)> {
    let data = vec![(vec![1.0, 0.5], 0.3), (vec![-0.4, 1.0], -0.2), (vec![0.2, 0.2], 1.0)];
    let region = Region::cube(2, -1.0, 1.0).unwrap();
    vec![
        ("zero", Arc::new(FnProblem::zero(Set::whole_space(2), Set::simplex(2).unwrap()).unwrap()) as Shared),
        ("scalar-bilinear", Arc::new(scalar_bilinear())),
        ("box-simplex-bilinear", Arc::new(box_simplex_bilinear())),
        ("hand-2", Arc::new(hand_two_component::<f64>().unwrap())),
        ("hand-3", Arc::new(hand_three_component::<f64>().unwrap())),
        ("finite-max", Arc::new(small_finite_max(0))),
        (
            "regression-linear",
            Arc::new(
                make_robust_regression(&data, RegressionMap::Linear, Set::whole_space(2), region.clone()).unwrap(),
            ),
        ),
        (
            "regression-cubic",
            Arc::new(
                make_robust_regression(
                    &data,
                    RegressionMap::Smooth {
                        map: Arc::new(Cubic),
                        lipschitz: 40.0,
                        hessian_bound: 40.0,
                        weak_convexity: 20.0,
                    },
                    Set::whole_space(2),
                    region,
                )
                .unwrap(),
            ),
        ),
    ]
}

/// Random primal point: uniform in the operating region when it is bounded,
/// else drawn from `X`.
pub fn sample_x<P: MinMaxProblem<f64> + ?Sized>(p: &P, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x = if p.region().is_bounded() { sample_in_region(p.region(), rng) } else { sample_in_set(p.x_set(), rng) };
    p.project_x(&x).unwrap()
}

pub fn sample_y<P: MinMaxProblem<f64> + ?Sized>(p: &P, rng: &mut ChaCha8Rng) -> Vec<f64> {
    sample_in_set(p.y_set(), rng)
}
