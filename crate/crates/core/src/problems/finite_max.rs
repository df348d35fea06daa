use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{add, axpy, dot, norm, Matrix};
use crate::problem::{check_gradients, validate_blocks, FnProblem, MinMaxProblem, Region};
use crate::projections::FeasibleSet;
use crate::scalar::Real;

/// `q(x) = ½xᵀAx + bᵀx + c` with symmetric `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadratic<T> {
    pub(crate) a: Matrix<T>,
    pub(crate) b: Vec<T>,
    pub(crate) c: T,
}

impl<T: Real> Quadratic<T> {
    pub fn new(a: Matrix<T>, b: Vec<T>, c: T) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n || b.len() != n {
            return Err(Error::Dimension(format!(
                "quadratic term is {}x{}, linear term has {}",
                a.rows(),
                a.cols(),
                b.len()
            )));
        }
        let scale = a.as_slice().iter().fold(T::one(), |m, v| m.max(v.abs()));
        if !a.is_symmetric(T::lit(1e-12) * scale) {
            return Err(Error::Domain("quadratic term must be symmetric".into()));
        }
        Ok(Quadratic { a, b, c })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn linear(&self) -> &[T] {
        &self.b
    }

    pub fn offset(&self) -> T {
        self.c
    }

    pub fn value(&self, x: &[T]) -> T {
        T::lit(0.5) * dot(x, &self.a.mul_vec(x)) + dot(&self.b, x) + self.c
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        add(&self.a.mul_vec(x), &self.b)
    }
}

/// A smooth component supplied by the caller.
pub trait SmoothComponent<T: Real>: Send + Sync {
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
}

#[derive(Clone)]
pub enum Component<T: Real> {
    Quadratic(Quadratic<T>),
    Smooth(Arc<dyn SmoothComponent<T>>),
}

impl<T: Real> fmt::Debug for Component<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Quadratic(q) => f.debug_tuple("Quadratic").field(q).finish(),
            Component::Smooth(_) => f.write_str("Smooth(..)"),
        }
    }
}

impl<T: Real> Component<T> {
    pub fn value(&self, x: &[T]) -> T {
        match self {
            Component::Quadratic(q) => q.value(x),
            Component::Smooth(s) => s.value(x),
        }
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        match self {
            Component::Quadratic(q) => q.gradient(x),
            Component::Smooth(s) => s.gradient(x),
        }
    }
}

/// `min_x max_i f_i(x)` written as `min_x max_{y∈Δ} Σ y_i f_i(x)`.
#[derive(Debug, Clone)]
pub struct FiniteMaxProblem<T: Real> {
    pub(crate) n: usize,
    pub(crate) components: Vec<Component<T>>,
    pub(crate) x_set: FeasibleSet<T>,
    pub(crate) y_set: FeasibleSet<T>,
    pub(crate) region: Region<T>,
    pub(crate) lipschitz: T,
    pub(crate) hessian_bound: T,
    pub(crate) weak_convexity: T,
    pub(crate) blocks: Option<Vec<Range<usize>>>,
    pub(crate) lower_bound: Option<T>,
    pub(crate) id: String,
    pub(crate) seed: Option<u64>,
}

/// Box on which the gradient bounds are certified: the region when bounded,
/// else a bounded box `X`.
fn certified_box<T: Real>(x_set: &FeasibleSet<T>, region: &Region<T>) -> Option<(Vec<T>, T)> {
    if let (Some(c), Some(r)) = (region.center(), region.radius()) {
        return Some((c, r));
    }
    match x_set {
        FeasibleSet::Box { lo, hi } if lo.iter().chain(hi).all(|v| v.is_finite()) => {
            let r = crate::linalg::dist(lo, hi) / T::lit(2.0);
            Some((lo.iter().zip(hi).map(|(&l, &h)| (l + h) / T::lit(2.0)).collect(), r))
        }
        FeasibleSet::L2Ball { center, radius } => Some((center.clone(), *radius)),
        _ => None,
    }
}

impl<T: Real> FiniteMaxProblem<T> {
    /// Quadratic components with `L = max‖A_i‖ + (Σ_i sup‖A_i x + b_i‖²)^½`,
    /// the sup taken over the region (or `X` when the region is unbounded).
    pub fn from_quadratics(
        quadratics: Vec<Quadratic<T>>,
        x_set: FeasibleSet<T>,
        region: Region<T>,
    ) -> Result<Self> {
        if quadratics.is_empty() {
            return Err(Error::Domain("finite-max problem needs at least one component".into()));
        }
        let n = x_set.dim();
        if let Some(q) = quadratics.iter().find(|q| q.b.len() != n) {
            return Err(Error::Dimension(format!("component has dimension {}, X has {n}", q.b.len())));
        }
        let norms: Vec<T> = quadratics.iter().map(|q| q.a.spectral_norm()).collect();
        let hessian_bound = norms.iter().copied().fold(T::zero(), T::max);
        let bounds = match certified_box(&x_set, &region) {
            Some((center, radius)) => quadratics
                .iter()
                .zip(&norms)
                .map(|(q, &an)| an * radius + norm(&q.gradient(&center)))
                .collect::<Vec<_>>(),
            None if hessian_bound == T::zero() => quadratics.iter().map(|q| norm(&q.b)).collect(),
            None => {
                return Err(Error::Config(
                    "finite-max Lipschitz bound needs a bounded operating region".into(),
                ))
            }
        };
        let cross = bounds.iter().map(|g| *g * *g).sum::<T>().sqrt();
        let lipschitz = (hessian_bound + cross).max(T::lit(1e-12));
        let min_eig = quadratics
            .iter()
            .filter_map(|q| q.a.symmetric_eigenvalues().first().copied())
            .fold(T::zero(), T::min);
        let components = quadratics.into_iter().map(Component::Quadratic).collect();
        Self::assemble(components, x_set, region, lipschitz, hessian_bound, -min_eig)
    }

    /// Arbitrary smooth components with caller-certified constants: `L` for the
    /// joint gradient map, `hessian_bound` for each `∇f_i`, and the weak
    /// convexity modulus of `x ↦ f(x, y)`.
    pub fn from_components(
        components: Vec<Component<T>>,
        x_set: FeasibleSet<T>,
        region: Region<T>,
        lipschitz: T,
        hessian_bound: T,
        weak_convexity: T,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("finite-max problem needs at least one component".into()));
        }
        if !(lipschitz > T::zero()) || !lipschitz.is_finite() {
            return Err(Error::Parameter(format!("Lipschitz constant {lipschitz} must be positive")));
        }
        Self::assemble(components, x_set, region, lipschitz, hessian_bound, weak_convexity)
    }

    fn assemble(
        components: Vec<Component<T>>,
        x_set: FeasibleSet<T>,
        region: Region<T>,
        lipschitz: T,
        hessian_bound: T,
        weak_convexity: T,
    ) -> Result<Self> {
        x_set.validate()?;
        let n = x_set.dim();
        if region.dim() != n {
            return Err(Error::Dimension(format!("region has dimension {}, X has {n}", region.dim())));
        }
        let m = components.len();
        Ok(FiniteMaxProblem {
            n,
            components,
            x_set,
            y_set: FeasibleSet::simplex(m)?,
            region,
            lipschitz,
            hessian_bound,
            weak_convexity: weak_convexity.max(T::zero()),
            blocks: None,
            lower_bound: None,
            id: String::from("finite-max"),
            seed: None,
        })
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_lower_bound(mut self, bound: T) -> Self {
        self.lower_bound = Some(bound);
        self
    }

    pub fn with_blocks(mut self, blocks: Vec<Range<usize>>) -> Result<Self> {
        validate_blocks(&blocks, self.n)?;
        if !self.x_set.is_product_over(&blocks) {
            return Err(Error::Unsupported("X does not factor over the requested blocks".into()));
        }
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub(crate) fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn components(&self) -> &[Component<T>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    /// Bound on `‖∇²f_i‖` shared by all components.
    pub fn hessian_bound(&self) -> T {
        self.hessian_bound
    }

    /// `F(x) = (f_1(x), …, f_m(x))`.
    pub fn values(&self, x: &[T]) -> Vec<T> {
        self.components.iter().map(|c| c.value(x)).collect()
    }

    /// Rows are `∇f_i(x)ᵀ`.
    pub fn jacobian(&self, x: &[T]) -> Vec<Vec<T>> {
        self.components.iter().map(|c| c.gradient(x)).collect()
    }
}

impl<T: Real> MinMaxProblem<T> for FiniteMaxProblem<T> {
    fn dim_x(&self) -> usize {
        self.n
    }
    fn dim_y(&self) -> usize {
        self.components.len()
    }
    fn value(&self, x: &[T], y: &[T]) -> T {
        self.components.iter().zip(y).map(|(c, &yi)| yi * c.value(x)).sum()
    }
    fn grad_x(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut g = vec![T::zero(); self.n];
        for (c, &yi) in self.components.iter().zip(y) {
            if yi != T::zero() {
                axpy(yi, &c.gradient(x), &mut g);
            }
        }
        g
    }
    fn grad_y(&self, x: &[T], _y: &[T]) -> Vec<T> {
        self.values(x)
    }
    fn x_set(&self) -> &FeasibleSet<T> {
        &self.x_set
    }
    fn y_set(&self) -> &FeasibleSet<T> {
        &self.y_set
    }
    fn lipschitz(&self) -> T {
        self.lipschitz
    }
    fn weak_convexity(&self) -> T {
        self.weak_convexity
    }
    fn region(&self) -> &Region<T> {
        &self.region
    }
    fn blocks(&self) -> Option<&[Range<usize>]> {
        self.blocks.as_deref()
    }
    fn lower_bound(&self) -> Option<T> {
        self.lower_bound
    }
    fn psi(&self, x: &[T]) -> Option<T> {
        self.values(x).into_iter().reduce(T::max)
    }
}

/// Smooth prediction map `Ψ(x, ξ)` for robust regression.
pub trait SmoothMap<T: Real>: Send + Sync {
    fn value(&self, x: &[T], xi: &[T]) -> T;
    fn gradient(&self, x: &[T], xi: &[T]) -> Vec<T>;
}

#[derive(Clone)]
pub enum RegressionMap<T: Real> {
    /// `Ψ(x, ξ) = ξᵀx`; components become quadratics.
    Linear,
    /// Caller-supplied map with certified constants for the resulting
    /// finite-max problem.
    Smooth { map: Arc<dyn SmoothMap<T>>, lipschitz: T, hessian_bound: T, weak_convexity: T },
}

struct RegressionComponent<T: Real> {
    map: Arc<dyn SmoothMap<T>>,
    xi: Vec<T>,
    label: T,
}

impl<T: Real> SmoothComponent<T> for RegressionComponent<T> {
    fn value(&self, x: &[T]) -> T {
        let r = self.label - self.map.value(x, &self.xi);
        T::lit(0.5) * r * r
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        let r = self.label - self.map.value(x, &self.xi);
        self.map.gradient(x, &self.xi).into_iter().map(|g| -r * g).collect()
    }
}

/// Worst-case regression `min_x max_i ½(ℓ_i − Ψ(x, ξ_i))²`.
///
/// A supplied map is gradient-checked at `x = 0` and at each `ξ_i` (when
/// dimensions agree) before the problem is built.
pub fn make_robust_regression<T: Real>(
    data: &[(Vec<T>, T)],
    map: RegressionMap<T>,
    x_set: FeasibleSet<T>,
    region: Region<T>,
) -> Result<FiniteMaxProblem<T>> {
    if data.is_empty() {
        return Err(Error::Domain("regression needs at least one data point".into()));
    }
    let n = x_set.dim();
    match map {
        RegressionMap::Linear => {
            if let Some((xi, _)) = data.iter().find(|(xi, _)| xi.len() != n) {
                return Err(Error::Dimension(format!("feature has dimension {}, X has {n}", xi.len())));
            }
            let quadratics = data
                .iter()
                .map(|(xi, label)| {
                    let mut a = Matrix::zeros(n, n);
                    for i in 0..n {
                        for j in 0..n {
                            a[(i, j)] = xi[i] * xi[j];
                        }
                    }
                    let b = xi.iter().map(|&v| -*label * v).collect();
                    Quadratic::new(a, b, T::lit(0.5) * *label * *label)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FiniteMaxProblem::from_quadratics(quadratics, x_set, region)?.with_id("robust-regression"))
        }
        RegressionMap::Smooth { map, lipschitz, hessian_bound, weak_convexity } => {
            for (xi, _) in data {
                verify_map(&map, xi, n)?;
            }
            let components = data
                .iter()
                .map(|(xi, label)| {
                    Component::Smooth(Arc::new(RegressionComponent {
                        map: Arc::clone(&map),
                        xi: xi.clone(),
                        label: *label,
                    }) as Arc<dyn SmoothComponent<T>>)
                })
                .collect();
            Ok(FiniteMaxProblem::from_components(
                components,
                x_set,
                region,
                lipschitz,
                hessian_bound,
                weak_convexity,
            )?
            .with_id("robust-regression"))
        }
    }
}

const MAP_CHECK_TOL: f64 = 1e-6;

fn verify_map<T: Real>(map: &Arc<dyn SmoothMap<T>>, xi: &[T], n: usize) -> Result<()> {
    let xi = xi.to_vec();
    let (m_value, m_grad) = (Arc::clone(map), Arc::clone(map));
    let (xv, xg) = (xi.clone(), xi.clone());
    let probe = FnProblem::new(
        FeasibleSet::whole_space(n),
        FeasibleSet::whole_space(1),
        T::one(),
        move |x, _| m_value.value(x, &xv),
        move |x, _| m_grad.gradient(x, &xg),
        |_, _| vec![T::zero()],
    )?;
    let mut points = vec![vec![T::zero(); n], vec![T::lit(0.5); n]];
    if xi.len() == n {
        points.push(xi);
    }
    for x in &points {
        let dev = check_gradients(&probe, x, &[T::zero()], T::lit(1e-5))?;
        if !(dev <= T::lit(MAP_CHECK_TOL)) {
            return Err(Error::Domain(format!(
                "supplied regression map fails the gradient check (deviation {dev:e})"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{hand_three_component, hand_two_component};

    #[test]
    fn hand_instances() {
        let p = hand_two_component::<f64>().unwrap();
        assert_eq!(p.values(&[0.0]), vec![1.0, 1.0]);
        assert_eq!(p.grad_x(&[0.0], &[0.5, 0.5]), vec![0.0]);
        assert_eq!(p.psi(&[0.5]), Some(2.25));
        assert_eq!(p.weak_convexity(), 0.0);
        let q = hand_three_component::<f64>().unwrap();
        assert_eq!(q.values(&[0.0]), vec![1.0, 1.0, 10.0]);
        assert_eq!(q.value(&[0.0], &[0.0, 0.0, 1.0]), 10.0);
    }

    #[test]
    fn lipschitz_covers_cross_term() {
        let p = hand_two_component::<f64>().unwrap();
        // max‖A_i‖ = 2; sup over [-5,5] of |2x ∓ 2| = 12 for each component.
        assert!((p.lipschitz() - (2.0 + (2.0f64 * 144.0).sqrt())).abs() < 1e-12);
    }

    #[test]
    fn linear_regression_single_point() {
        let p = make_robust_regression(
            &[(vec![1.0, 0.0], 0.0)],
            RegressionMap::Linear,
            FeasibleSet::whole_space(2),
            Region::cube(2, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(p.values(&[0.6, 3.0]), vec![0.18]);
        assert_eq!(p.grad_x(&[0.6, 3.0], &[1.0]), vec![0.6, 0.0]);
    }

    #[test]
    fn symmetric_regression_pair() {
        let p = make_robust_regression(
            &[(vec![1.0], 1.0), (vec![1.0], -1.0)],
            RegressionMap::Linear,
            FeasibleSet::whole_space(1),
            Region::cube(1, -2.0, 2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(p.values(&[0.0]), vec![0.5, 0.5]);
        assert_eq!(p.grad_x(&[0.0], &[0.5, 0.5]), vec![0.0]);
    }

    struct Cubic;
    impl SmoothMap<f64> for Cubic {
        fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
            xi[0] * x[0].powi(3)
        }
        fn gradient(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
            vec![3.0 * xi[0] * x[0] * x[0]]
        }
    }

    struct BrokenCubic;
    impl SmoothMap<f64> for BrokenCubic {
        fn value(&self, x: &[f64], xi: &[f64]) -> f64 {
            xi[0] * x[0].powi(3)
        }
        fn gradient(&self, x: &[f64], xi: &[f64]) -> Vec<f64> {
            vec![2.0 * xi[0] * x[0] * x[0]]
        }
    }

    fn smooth(map: Arc<dyn SmoothMap<f64>>) -> RegressionMap<f64> {
        RegressionMap::Smooth { map, lipschitz: 100.0, hessian_bound: 100.0, weak_convexity: 50.0 }
    }

    #[test]
    fn nonlinear_regression_gradients() {
        let p = make_robust_regression(
            &[(vec![1.0], 0.5), (vec![-2.0], 1.0)],
            smooth(Arc::new(Cubic)),
            FeasibleSet::whole_space(1),
            Region::cube(1, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        let dev = check_gradients(&p, &[0.7], &[0.3, 0.7], 1e-5).unwrap();
        assert!(dev <= 1e-6, "{dev}");
    }

    #[test]
    fn broken_map_rejected() {
        let err = make_robust_regression(
            &[(vec![1.0], 0.5)],
            smooth(Arc::new(BrokenCubic)),
            FeasibleSet::whole_space(1),
            Region::cube(1, -1.0, 1.0).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
