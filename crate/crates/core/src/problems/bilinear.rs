use crate::error::{Error, Result};
use crate::linalg::{add, dot, norm, Matrix};
use crate::problem::{MinMaxProblem, Region};
use crate::projections::FeasibleSet;
use crate::scalar::Real;

/// `f(x, y) = xᵀAy + bᵀx + dᵀy`.
#[derive(Debug, Clone)]
pub struct Bilinear<T: Real> {
    pub(crate) a: Matrix<T>,
    pub(crate) b: Vec<T>,
    pub(crate) d: Vec<T>,
    pub(crate) x_set: FeasibleSet<T>,
    pub(crate) y_set: FeasibleSet<T>,
    pub(crate) region: Region<T>,
    pub(crate) lipschitz: T,
}

/// Builds the bilinear game with `L = ‖A‖₂` (1 when `A = 0`).
pub fn make_bilinear<T: Real>(
    a: Matrix<T>,
    b: Vec<T>,
    d: Vec<T>,
    x_set: FeasibleSet<T>,
    y_set: FeasibleSet<T>,
) -> Result<Bilinear<T>> {
    let (n, m) = (a.rows(), a.cols());
    if b.len() != n || d.len() != m || x_set.dim() != n || y_set.dim() != m {
        return Err(Error::Dimension(format!(
            "A is {n}x{m}, b has {}, d has {}, X has dim {}, Y has dim {}",
            b.len(),
            d.len(),
            x_set.dim(),
            y_set.dim()
        )));
    }
    x_set.validate()?;
    y_set.validate()?;
    let spectral = a.spectral_norm();
    let lipschitz = if spectral > T::zero() { spectral } else { T::one() };
    Ok(Bilinear { a, b, d, x_set, y_set, region: Region::unbounded(n), lipschitz })
}

impl<T: Real> Bilinear<T> {
    pub fn with_region(mut self, region: Region<T>) -> Result<Self> {
        if region.dim() != self.a.rows() {
            return Err(Error::Dimension("region dimension differs from n".into()));
        }
        self.region = region;
        Ok(self)
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn d(&self) -> &[T] {
        &self.d
    }
}

/// `max_{y∈Y} gᵀy`, `None` when unbounded.
fn support<T: Real>(set: &FeasibleSet<T>, g: &[T]) -> Option<T> {
    match set {
        FeasibleSet::WholeSpace { .. } => g.iter().all(|v| *v == T::zero()).then(T::zero),
        FeasibleSet::Box { lo, hi } => lo
            .iter()
            .zip(hi)
            .zip(g)
            .map(|((&l, &h), &gi)| {
                if gi > T::zero() {
                    gi * h
                } else if gi < T::zero() {
                    gi * l
                } else {
                    T::zero()
                }
            })
            .try_fold(T::zero(), |acc, v| v.is_finite().then(|| acc + v)),
        FeasibleSet::L2Ball { center, radius } => Some(dot(g, center) + *radius * norm(g)),
        FeasibleSet::Simplex { .. } => g.iter().copied().reduce(T::max),
    }
}

impl<T: Real> MinMaxProblem<T> for Bilinear<T> {
    fn dim_x(&self) -> usize {
        self.a.rows()
    }
    fn dim_y(&self) -> usize {
        self.a.cols()
    }
    fn value(&self, x: &[T], y: &[T]) -> T {
        dot(x, &self.a.mul_vec(y)) + dot(&self.b, x) + dot(&self.d, y)
    }
    fn grad_x(&self, _x: &[T], y: &[T]) -> Vec<T> {
        add(&self.a.mul_vec(y), &self.b)
    }
    fn grad_y(&self, x: &[T], _y: &[T]) -> Vec<T> {
        add(&self.a.tr_mul_vec(x), &self.d)
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
        T::zero()
    }
    fn region(&self) -> &Region<T> {
        &self.region
    }
    fn psi(&self, x: &[T]) -> Option<T> {
        let g = self.grad_y(x, &[]);
        support(&self.y_set, &g).map(|s| s + dot(&self.b, x))
    }
}
