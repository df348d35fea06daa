mod common;

use std::sync::Arc;

use common::{rng, sample_x, Cubic};
use rand::Rng;
use smoothgda::problems::{
    check_regularity, check_strict_complementarity, hand_three_component, hand_two_component, kkt_residual,
    make_bilinear, make_finite_max_quadratic, make_robust_regression, solve_reference, GeneratorSpec, InstanceDoc,
    Quadratic, RegressionMap, DEFAULT_SUPPORT_TOL, DEFAULT_TIE_TOL,
};
use smoothgda::{check_gradients, FiniteMax, Mat, MinMaxProblem, Region, Set};

fn scalar_quad(a: f64, b: f64, c: f64) -> Quadratic<f64> {
    Quadratic::new(Mat::from_rows(&[vec![a]]).unwrap(), vec![b], c).unwrap()
}

fn kkt(p: &FiniteMax, x: &[f64], y: &[f64]) -> smoothgda::problems::KktReport<f64> {
    kkt_residual(p, x, y, DEFAULT_TIE_TOL, DEFAULT_SUPPORT_TOL).unwrap()
}

#[test]
fn bilinear_examples() {
    let p = make_bilinear(Mat::identity(1), vec![0.0], vec![0.0], Set::whole_space(1), Set::cube(1, -1.0, 1.0).unwrap())
        .unwrap();
    assert_eq!(p.grad_x(&[0.0], &[0.0]), vec![0.0]);
    assert_eq!(p.grad_y(&[0.0], &[0.0]), vec![0.0]);

    let zero = make_bilinear(Mat::zeros(2, 2), vec![0.0; 2], vec![0.0; 2], Set::whole_space(2), Set::simplex(2).unwrap())
        .unwrap();
    let mut r = rng(0);
    for _ in 0..10 {
        let x: Vec<f64> = (0..2).map(|_| r.random_range(-3.0..3.0)).collect();
        assert_eq!(zero.grad_x(&x, &[0.3, 0.7]), vec![0.0; 2]);
        assert_eq!(zero.grad_y(&x, &[0.3, 0.7]), vec![0.0; 2]);
    }

    let id = make_bilinear(Mat::identity(2), vec![0.0; 2], vec![0.0; 2], Set::whole_space(2), Set::whole_space(2)).unwrap();
    assert!((id.lipschitz() - 1.0).abs() < 1e-12);
    let skew = Mat::from_rows(&[vec![3.0, 0.0], vec![4.0, 0.0]]).unwrap();
    let q = make_bilinear(skew, vec![0.0; 2], vec![0.0; 2], Set::whole_space(2), Set::whole_space(2)).unwrap();
    assert!((q.lipschitz() - 5.0).abs() < 1e-12);
}

#[test]
fn hand_instances_have_known_solutions() {
    let h2 = hand_two_component::<f64>().unwrap();
    let rep = kkt(&h2, &[0.0], &[0.5, 0.5]);
    assert!(rep.level() <= 1e-12, "{rep:?}");
    assert_eq!(h2.psi(&[0.0]), Some(1.0));

    let h3 = hand_three_component::<f64>().unwrap();
    let rep = kkt(&h3, &[0.0], &[0.0, 0.0, 1.0]);
    assert!(rep.level() <= 1e-12);
    assert_eq!(h3.psi(&[0.0]), Some(10.0));
    assert_eq!(check_strict_complementarity(&h3, &[0.0], &[0.0, 0.0, 1.0], 1e-12).unwrap(), 9.0);
    assert_eq!(check_strict_complementarity(&h2, &[0.0], &[0.5, 0.5], 1e-12).unwrap(), f64::INFINITY);
}

#[test]
fn kkt_examples() {
    let h2 = hand_two_component::<f64>().unwrap();
    let rep = kkt(&h2, &[1.0], &[1.0, 0.0]);
    assert_eq!(rep.grad_residual, 0.0);
    assert_eq!(rep.mu, 4.0);
    assert_eq!(rep.nu, vec![4.0, 0.0]);
    assert_eq!(rep.complementarity, 4.0);
    assert_eq!(kkt(&h2, &[0.0], &[1.0, 1.0]).feasibility, 1.0);
}

#[test]
fn degenerate_complementarity_gap_is_zero() {
    let p = FiniteMax::from_quadratics(
        vec![scalar_quad(2.0, 0.0, 0.0), scalar_quad(2.0, 0.0, 0.0)],
        Set::whole_space(1),
        Region::cube(1, -1.0, 1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(check_strict_complementarity(&p, &[0.0], &[1.0, 0.0], 1e-12).unwrap(), 0.0);
    assert!(check_strict_complementarity(&p, &[1.0], &[1.0, 0.0], 1e-12).is_err());
}

#[test]
fn regularity_examples() {
    let h2 = hand_two_component::<f64>().unwrap();
    assert!((check_regularity(&h2, &[0.0], DEFAULT_TIE_TOL).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let single = check_regularity(&h2, &[1.0], DEFAULT_TIE_TOL).unwrap();
    assert!((single - 17f64.sqrt()).abs() < 1e-12);
    let dup = FiniteMax::from_quadratics(
        vec![scalar_quad(2.0, -2.0, 1.0), scalar_quad(2.0, -2.0, 1.0)],
        Set::whole_space(1),
        Region::cube(1, -5.0, 5.0).unwrap(),
    )
    .unwrap();
    assert!(check_regularity(&dup, &[0.3], DEFAULT_TIE_TOL).unwrap() < 1e-12);
}

#[test]
fn regression_examples() {
    let region = Region::cube(1, -3.0, 3.0).unwrap();
    let one = make_robust_regression(&[(vec![1.0], 0.0)], RegressionMap::Linear, Set::whole_space(1), region.clone())
        .unwrap();
    assert_eq!(one.values(&[2.0]), vec![2.0]);
    assert_eq!(one.values(&[0.0]), vec![0.0]);

    let two = make_robust_regression(
        &[(vec![1.0], 1.0), (vec![1.0], -1.0)],
        RegressionMap::Linear,
        Set::whole_space(1),
        region,
    )
    .unwrap();
    assert_eq!(two.values(&[0.0]), vec![0.5, 0.5]);
    assert!(kkt(&two, &[0.0], &[0.5, 0.5]).level() <= 1e-12);

    let data = vec![(vec![1.0, 0.5], 0.3), (vec![-0.4, 1.0], -0.2)];
    let cubic = make_robust_regression(
        &data,
        RegressionMap::Smooth { map: Arc::new(Cubic), lipschitz: 40.0, hessian_bound: 40.0, weak_convexity: 20.0 },
        Set::whole_space(2),
        Region::cube(2, -1.0, 1.0).unwrap(),
    )
    .unwrap();
    let mut r = rng(1);
    for _ in 0..20 {
        let x = sample_x(&cubic, &mut r);
        assert!(check_gradients(&cubic, &x, &[0.5, 0.5], 1e-5).unwrap() <= 1e-6);
    }
}

struct WrongGradient;

impl smoothgda::problems::SmoothMap<f64> for WrongGradient {
    fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
        xi.iter().zip(x).map(|(a, b)| a * b * b).sum()
    }
    fn gradient(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
        xi.iter().zip(x).map(|(a, b)| a * b).collect()
    }
}

#[test]
fn regression_rejects_inconsistent_map() {
    let res = make_robust_regression(
        &[(vec![1.0], 1.0)],
        RegressionMap::Smooth { map: Arc::new(WrongGradient), lipschitz: 10.0, hessian_bound: 10.0, weak_convexity: 5.0 },
        Set::whole_space(1),
        Region::cube(1, -1.0, 1.0).unwrap(),
    );
    assert!(matches!(res, Err(smoothgda::Error::Domain(_))));
}

#[test]
fn generator_is_deterministic() {
    let spec = GeneratorSpec::default();
    let a = make_finite_max_quadratic::<f64>(5, 4, 42, &spec).unwrap();
    let b = make_finite_max_quadratic::<f64>(5, 4, 42, &spec).unwrap();
    assert_eq!(InstanceDoc::from_finite_max(&a).unwrap(), InstanceDoc::from_finite_max(&b).unwrap());
    assert_eq!(a.lipschitz().to_bits(), b.lipschitz().to_bits());
    assert_eq!(a.id(), "finite-max-n5-m4-s42");
}

#[test]
fn targeted_instances_have_a_gap() {
    for seed in 0..5 {
        let p = make_finite_max_quadratic::<f64>(6, 4, seed, &GeneratorSpec::targeted()).unwrap();
        let sol = solve_reference(&p, &[0.0; 6], 1e-8, 20_000).unwrap();
        let gap = check_strict_complementarity(&p, &sol.x, &sol.y, 1e-8).unwrap();
        assert!(gap >= 0.1, "seed {seed}: {gap}");
    }
}

#[test]
fn generated_instances_have_consistent_gradients_and_psi() {
    let p = make_finite_max_quadratic::<f64>(5, 4, 3, &GeneratorSpec::default()).unwrap();
    let mut r = rng(4);
    for _ in 0..100 {
        let x = sample_x(&p, &mut r);
        let y: Vec<f64> = {
            let v: Vec<f64> = (0..4).map(|_| r.random::<f64>()).collect();
            let s: f64 = v.iter().sum();
            v.iter().map(|a| a / s).collect()
        };
        assert!(check_gradients(&p, &x, &y, 1e-5).unwrap() <= 1e-6);
        // ψ(x) against enumeration of the simplex vertices
        let vertex_max = (0..4)
            .map(|i| {
                let mut e = vec![0.0; 4];
                e[i] = 1.0;
                p.value(&x, &e)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let psi = p.psi(&x).unwrap();
        assert!((psi - vertex_max).abs() <= 1e-12 * psi.abs().max(1.0));
        assert!(p.value(&x, &y) <= psi + 1e-12);
    }
}

#[test]
fn instances_round_trip_through_json() {
    let p = make_finite_max_quadratic::<f64>(3, 2, 9, &GeneratorSpec::default()).unwrap();
    let doc = InstanceDoc::from_finite_max(&p).unwrap();
    let back: FiniteMax = InstanceDoc::from_json(&doc.to_json().unwrap()).unwrap().finite_max().unwrap();
    assert_eq!(back.lipschitz(), p.lipschitz());
    assert_eq!(back.id(), p.id());
    let x = [0.1, -0.4, 2.0];
    assert_eq!(back.values(&x), p.values(&x));

    let bil = make_bilinear(Mat::identity(2), vec![1.0, 0.0], vec![0.0, -1.0], Set::whole_space(2), Set::simplex(2).unwrap())
        .unwrap();
    let doc = InstanceDoc::from_bilinear(&bil);
    let back = InstanceDoc::from_json(&doc.to_json().unwrap()).unwrap().bilinear::<f64>().unwrap();
    assert_eq!(back.value(&[1.0, 2.0], &[0.5, 0.5]), bil.value(&[1.0, 2.0], &[0.5, 0.5]));
    assert!(InstanceDoc::from_json("{\"kind\": \"nope\"}").is_err());
}

#[test]
fn generator_rejects_bad_specs() {
    let bad = GeneratorSpec { eig_lo: 2.0, eig_hi: 1.0, ..GeneratorSpec::default() };
    assert!(make_finite_max_quadratic::<f64>(3, 2, 0, &bad).is_err());
    assert!(make_finite_max_quadratic::<f64>(0, 2, 0, &GeneratorSpec::default()).is_err());
    let impossible = GeneratorSpec { kkt_tol: 1e-300, max_attempts: 2, ..GeneratorSpec::targeted() };
    assert!(matches!(
        make_finite_max_quadratic::<f64>(3, 2, 0, &impossible),
        Err(smoothgda::Error::Generation { attempts: 2 })
    ));
}
