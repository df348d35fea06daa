//! The min-max problem contract and oracle utilities.

use std::ops::Range;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{dist, first_non_finite};
use crate::projections::FeasibleSet;
use crate::sampling::{sample_in_region, sample_in_set};
use crate::scalar::Real;

/// Axis-aligned box in primal space over which the Lipschitz constant is
/// certified. Infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    lo: Vec<T>,
    hi: Vec<T>,
}

impl<T: Real> Region<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension("region bounds of different length".into()));
        }
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| !(l <= h)) {
            return Err(Error::Domain(format!("region lower bound exceeds upper bound at {i}")));
        }
        Ok(Region { lo, hi })
    }

    pub fn unbounded(n: usize) -> Self {
        Region { lo: vec![T::neg_infinity(); n], hi: vec![T::infinity(); n] }
    }

    pub fn cube(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|v| v.is_finite())
    }

    /// First coordinate outside the region, if any.
    pub fn violation(&self, x: &[T]) -> Option<usize> {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .position(|(&v, (&l, &h))| !(v >= l && v <= h))
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.violation(x).is_none()
    }

    pub fn center(&self) -> Option<Vec<T>> {
        self.is_bounded().then(|| {
            self.lo.iter().zip(&self.hi).map(|(&l, &h)| (l + h) / T::lit(2.0)).collect()
        })
    }

    /// Largest distance from the center to a point of the region.
    pub fn radius(&self) -> Option<T> {
        self.is_bounded().then(|| dist(&self.lo, &self.hi) / T::lit(2.0))
    }

    pub fn as_set(&self) -> FeasibleSet<T> {
        if self.is_bounded() {
            FeasibleSet::Box { lo: self.lo.clone(), hi: self.hi.clone() }
        } else {
            FeasibleSet::WholeSpace { dim: self.dim() }
        }
    }
}

/// Checks that `blocks` are disjoint contiguous ranges covering `0..n` in order.
pub fn validate_blocks(blocks: &[Range<usize>], n: usize) -> Result<()> {
    let mut next = 0;
    for b in blocks {
        if b.start != next || b.end <= b.start {
            return Err(Error::Config(format!(
                "blocks must be non-empty, disjoint and cover 0..{n} in order (bad block {b:?})"
            )));
        }
        next = b.end;
    }
    if next != n {
        return Err(Error::Config(format!("blocks cover 0..{next}, expected 0..{n}")));
    }
    Ok(())
}

/// Splits `0..n` into `count` nearly equal contiguous blocks.
pub fn even_blocks(n: usize, count: usize) -> Vec<Range<usize>> {
    let count = count.clamp(1, n.max(1));
    let base = n / count;
    let extra = n % count;
    let mut start = 0;
    (0..count)
        .map(|i| {
            let len = base + usize::from(i < extra);
            let r = start..start + len;
            start += len;
            r
        })
        .collect()
}

/// Oracle bundle for `min_{x∈X} max_{y∈Y} f(x, y)`.
///
/// Implementations must be pure: repeated calls with the same arguments
/// return bit-identical results.
pub trait MinMaxProblem<T: Real>: Send + Sync {
    fn dim_x(&self) -> usize;
    fn dim_y(&self) -> usize;
    fn value(&self, x: &[T], y: &[T]) -> T;
    fn grad_x(&self, x: &[T], y: &[T]) -> Vec<T>;
    fn grad_y(&self, x: &[T], y: &[T]) -> Vec<T>;
    fn x_set(&self) -> &FeasibleSet<T>;
    fn y_set(&self) -> &FeasibleSet<T>;

    /// Lipschitz constant of the joint gradient over [`Self::region`].
    fn lipschitz(&self) -> T;

    /// Modulus `ρ ≤ L` such that `f(·, y) + ρ/2‖·‖²` is convex for all
    /// `y ∈ Y`. Inner argmin solves need `p > ρ`.
    fn weak_convexity(&self) -> T {
        self.lipschitz()
    }

    fn region(&self) -> &Region<T>;

    fn blocks(&self) -> Option<&[Range<usize>]> {
        None
    }

    /// Known lower bound on `ψ(x) = max_y f(x, y)`.
    fn lower_bound(&self) -> Option<T> {
        None
    }

    /// Exact `ψ(x)` when it has a closed form.
    fn psi(&self, _x: &[T]) -> Option<T> {
        None
    }

    fn project_x(&self, v: &[T]) -> Result<Vec<T>> {
        self.x_set().project(v)
    }

    fn project_y(&self, v: &[T]) -> Result<Vec<T>> {
        self.y_set().project(v)
    }

    fn diameter_y(&self) -> Option<T> {
        self.y_set().diameter()
    }
}

impl<T: Real, P: MinMaxProblem<T> + ?Sized> MinMaxProblem<T> for Arc<P> {
    fn dim_x(&self) -> usize {
        (**self).dim_x()
    }
    fn dim_y(&self) -> usize {
        (**self).dim_y()
    }
    fn value(&self, x: &[T], y: &[T]) -> T {
        (**self).value(x, y)
    }
    fn grad_x(&self, x: &[T], y: &[T]) -> Vec<T> {
        (**self).grad_x(x, y)
    }
    fn grad_y(&self, x: &[T], y: &[T]) -> Vec<T> {
        (**self).grad_y(x, y)
    }
    fn x_set(&self) -> &FeasibleSet<T> {
        (**self).x_set()
    }
    fn y_set(&self) -> &FeasibleSet<T> {
        (**self).y_set()
    }
    fn lipschitz(&self) -> T {
        (**self).lipschitz()
    }
    fn weak_convexity(&self) -> T {
        (**self).weak_convexity()
    }
    fn region(&self) -> &Region<T> {
        (**self).region()
    }
    fn blocks(&self) -> Option<&[Range<usize>]> {
        (**self).blocks()
    }
    fn lower_bound(&self) -> Option<T> {
        (**self).lower_bound()
    }
    fn psi(&self, x: &[T]) -> Option<T> {
        (**self).psi(x)
    }
    fn project_x(&self, v: &[T]) -> Result<Vec<T>> {
        (**self).project_x(v)
    }
    fn project_y(&self, v: &[T]) -> Result<Vec<T>> {
        (**self).project_y(v)
    }
}

pub(crate) fn checked_value<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x: &[T],
    y: &[T],
) -> Result<T> {
    let v = problem.value(x, y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::OracleFailure { oracle: "eval_f", coordinate: 0 })
    }
}

pub(crate) fn checked_grad_x<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x: &[T],
    y: &[T],
) -> Result<Vec<T>> {
    let g = problem.grad_x(x, y);
    if g.len() != problem.dim_x() {
        return Err(Error::Dimension(format!("grad_x returned {} entries", g.len())));
    }
    match first_non_finite(&g) {
        Some(coordinate) => Err(Error::OracleFailure { oracle: "grad_x", coordinate }),
        None => Ok(g),
    }
}

pub(crate) fn checked_grad_y<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x: &[T],
    y: &[T],
) -> Result<Vec<T>> {
    let g = problem.grad_y(x, y);
    if g.len() != problem.dim_y() {
        return Err(Error::Dimension(format!("grad_y returned {} entries", g.len())));
    }
    match first_non_finite(&g) {
        Some(coordinate) => Err(Error::OracleFailure { oracle: "grad_y", coordinate }),
        None => Ok(g),
    }
}

type ValueFn<T> = Box<dyn Fn(&[T], &[T]) -> T + Send + Sync>;
type GradFn<T> = Box<dyn Fn(&[T], &[T]) -> Vec<T> + Send + Sync>;

/// A problem assembled from closures.
pub struct FnProblem<T: Real> {
    n: usize,
    m: usize,
    value: ValueFn<T>,
    grad_x: GradFn<T>,
    grad_y: GradFn<T>,
    x_set: FeasibleSet<T>,
    y_set: FeasibleSet<T>,
    lipschitz: T,
    weak_convexity: Option<T>,
    region: Region<T>,
    blocks: Option<Vec<Range<usize>>>,
    lower_bound: Option<T>,
}

impl<T: Real> FnProblem<T> {
    pub fn new(
        x_set: FeasibleSet<T>,
        y_set: FeasibleSet<T>,
        lipschitz: T,
        value: impl Fn(&[T], &[T]) -> T + Send + Sync + 'static,
        grad_x: impl Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static,
        grad_y: impl Fn(&[T], &[T]) -> Vec<T> + Send + Sync + 'static,
    ) -> Result<Self> {
        x_set.validate()?;
        y_set.validate()?;
        if !(lipschitz > T::zero()) || !lipschitz.is_finite() {
            return Err(Error::Parameter(format!("Lipschitz constant {lipschitz} must be positive")));
        }
        let n = x_set.dim();
        Ok(FnProblem {
            n,
            m: y_set.dim(),
            value: Box::new(value),
            grad_x: Box::new(grad_x),
            grad_y: Box::new(grad_y),
            x_set,
            y_set,
            lipschitz,
            weak_convexity: None,
            region: Region::unbounded(n),
            blocks: None,
            lower_bound: None,
        })
    }

    /// `f ≡ 0`. `L` is reported as 1 so parameter derivation stays defined.
    pub fn zero(x_set: FeasibleSet<T>, y_set: FeasibleSet<T>) -> Result<Self> {
        let (n, m) = (x_set.dim(), y_set.dim());
        Ok(Self::new(
            x_set,
            y_set,
            T::one(),
            |_, _| T::zero(),
            move |_, _| vec![T::zero(); n],
            move |_, _| vec![T::zero(); m],
        )?
        .with_weak_convexity(T::zero())
        .with_lower_bound(T::zero()))
    }

    pub fn with_region(mut self, region: Region<T>) -> Result<Self> {
        if region.dim() != self.n {
            return Err(Error::Dimension("region dimension differs from n".into()));
        }
        self.region = region;
        Ok(self)
    }

    pub fn with_blocks(mut self, blocks: Vec<Range<usize>>) -> Result<Self> {
        validate_blocks(&blocks, self.n)?;
        if !self.x_set.is_product_over(&blocks) {
            return Err(Error::Config("X is not a product set over the declared blocks".into()));
        }
        self.blocks = Some(blocks);
        Ok(self)
    }

    pub fn with_lower_bound(mut self, bound: T) -> Self {
        self.lower_bound = Some(bound);
        self
    }

    pub fn with_weak_convexity(mut self, rho: T) -> Self {
        self.weak_convexity = Some(rho);
        self
    }
}

impl<T: Real> MinMaxProblem<T> for FnProblem<T> {
    fn dim_x(&self) -> usize {
        self.n
    }
    fn dim_y(&self) -> usize {
        self.m
    }
    fn value(&self, x: &[T], y: &[T]) -> T {
        (self.value)(x, y)
    }
    fn grad_x(&self, x: &[T], y: &[T]) -> Vec<T> {
        (self.grad_x)(x, y)
    }
    fn grad_y(&self, x: &[T], y: &[T]) -> Vec<T> {
        (self.grad_y)(x, y)
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
        self.weak_convexity.unwrap_or(self.lipschitz)
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
}

/// Attaches a block partition to an existing problem.
pub struct Blocked<P> {
    inner: P,
    blocks: Vec<Range<usize>>,
}

impl<P> Blocked<P> {
    pub fn new<T: Real>(inner: P, blocks: Vec<Range<usize>>) -> Result<Self>
    where
        P: MinMaxProblem<T>,
    {
        validate_blocks(&blocks, inner.dim_x())?;
        if !inner.x_set().is_product_over(&blocks) {
            return Err(Error::Config("X is not a product set over the declared blocks".into()));
        }
        Ok(Blocked { inner, blocks })
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<T: Real, P: MinMaxProblem<T>> MinMaxProblem<T> for Blocked<P> {
    fn dim_x(&self) -> usize {
        self.inner.dim_x()
    }
    fn dim_y(&self) -> usize {
        self.inner.dim_y()
    }
    fn value(&self, x: &[T], y: &[T]) -> T {
        self.inner.value(x, y)
    }
    fn grad_x(&self, x: &[T], y: &[T]) -> Vec<T> {
        self.inner.grad_x(x, y)
    }
    fn grad_y(&self, x: &[T], y: &[T]) -> Vec<T> {
        self.inner.grad_y(x, y)
    }
    fn x_set(&self) -> &FeasibleSet<T> {
        self.inner.x_set()
    }
    fn y_set(&self) -> &FeasibleSet<T> {
        self.inner.y_set()
    }
    fn lipschitz(&self) -> T {
        self.inner.lipschitz()
    }
    fn weak_convexity(&self) -> T {
        self.inner.weak_convexity()
    }
    fn region(&self) -> &Region<T> {
        self.inner.region()
    }
    fn blocks(&self) -> Option<&[Range<usize>]> {
        Some(&self.blocks)
    }
    fn lower_bound(&self) -> Option<T> {
        self.inner.lower_bound()
    }
    fn psi(&self, x: &[T]) -> Option<T> {
        self.inner.psi(x)
    }
    fn project_x(&self, v: &[T]) -> Result<Vec<T>> {
        self.inner.project_x(v)
    }
    fn project_y(&self, v: &[T]) -> Result<Vec<T>> {
        self.inner.project_y(v)
    }
}

/// Largest relative deviation between the analytic gradients and central
/// finite differences of `eval_f` with step `h`.
///
/// Deviations are measured as `|g − ĝ| / max(1, |g|, |ĝ|)`.
pub fn check_gradients<T: Real, P: MinMaxProblem<T> + ?Sized>(
    problem: &P,
    x: &[T],
    y: &[T],
    h: T,
) -> Result<T> {
    if !(h >= T::lit(1e-8) && h <= T::lit(1e-3)) {
        return Err(Error::Parameter(format!("finite-difference step {h} outside [1e-8, 1e-3]")));
    }
    if x.len() != problem.dim_x() || y.len() != problem.dim_y() {
        return Err(Error::Dimension("point does not match problem dimensions".into()));
    }
    let gx = checked_grad_x(problem, x, y)?;
    let gy = checked_grad_y(problem, x, y)?;
    let two_h = T::lit(2.0) * h;

    let central = |oracle: &'static str, i: usize, plus: T, minus: T| -> Result<T> {
        if plus.is_finite() && minus.is_finite() {
            Ok((plus - minus) / two_h)
        } else {
            Err(Error::OracleFailure { oracle, coordinate: i })
        }
    };
    let rel = |a: T, b: T| (a - b).abs() / T::one().max(a.abs()).max(b.abs());

    let mut worst = T::zero();
    let mut xp = x.to_vec();
    for i in 0..x.len() {
        xp[i] = x[i] + h;
        let plus = problem.value(&xp, y);
        xp[i] = x[i] - h;
        let minus = problem.value(&xp, y);
        xp[i] = x[i];
        worst = worst.max(rel(gx[i], central("eval_f", i, plus, minus)?));
    }
    let mut yp = y.to_vec();
    for j in 0..y.len() {
        yp[j] = y[j] + h;
        let plus = problem.value(x, &yp);
        yp[j] = y[j] - h;
        let minus = problem.value(x, &yp);
        yp[j] = y[j];
        worst = worst.max(rel(gy[j], central("eval_f", x.len() + j, plus, minus)?));
    }
    Ok(worst)
}

/// Outcome of a sampled Lipschitz audit: largest observed ratio of gradient
/// change to argument change, per gradient block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzAudit<T> {
    pub grad_x_in_x: T,
    pub grad_x_in_y: T,
    pub grad_y_in_x: T,
}

impl<T: Real> LipschitzAudit<T> {
    pub fn max_ratio(&self) -> T {
        self.grad_x_in_x.max(self.grad_x_in_y).max(self.grad_y_in_x)
    }
}

/// Samples pairs of points in the operating region (projected onto X) and
/// in Y, and records the largest gradient-change ratios.
pub fn audit_lipschitz<T: Real, P: MinMaxProblem<T> + ?Sized, R: Rng + ?Sized>(
    problem: &P,
    samples: usize,
    rng: &mut R,
) -> Result<LipschitzAudit<T>> {
    let mut audit = LipschitzAudit { grad_x_in_x: T::zero(), grad_x_in_y: T::zero(), grad_y_in_x: T::zero() };
    let ratio = |num: T, den: T| if den > T::zero() { num / den } else { T::zero() };
    for _ in 0..samples {
        let x1 = problem.project_x(&sample_in_region(problem.region(), rng))?;
        let x2 = problem.project_x(&sample_in_region(problem.region(), rng))?;
        let y1 = sample_in_set(problem.y_set(), rng);
        let y2 = sample_in_set(problem.y_set(), rng);
        let dx = dist(&x1, &x2);
        let dy = dist(&y1, &y2);
        let g11 = checked_grad_x(problem, &x1, &y1)?;
        let g21 = checked_grad_x(problem, &x2, &y1)?;
        let g12 = checked_grad_x(problem, &x1, &y2)?;
        audit.grad_x_in_x = audit.grad_x_in_x.max(ratio(dist(&g11, &g21), dx));
        audit.grad_x_in_y = audit.grad_x_in_y.max(ratio(dist(&g11, &g12), dy));
        let h1 = checked_grad_y(problem, &x1, &y1)?;
        let h2 = checked_grad_y(problem, &x2, &y1)?;
        audit.grad_y_in_x = audit.grad_y_in_x.max(ratio(dist(&h1, &h2), dx));
    }
    Ok(audit)
}
