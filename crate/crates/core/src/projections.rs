//! Euclidean projections onto the feasible sets used by the problem classes.

use std::cmp::Ordering;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{compensated_sum, dist};
use crate::scalar::Real;

/// Above this dimension the simplex threshold is accumulated with
/// compensated summation.
const COMPENSATED_SUM_DIM: usize = 10_000;

/// A closed convex set with an exact Euclidean projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub enum FeasibleSet<T> {
    WholeSpace { dim: usize },
    Box { lo: Vec<T>, hi: Vec<T> },
    L2Ball { center: Vec<T>, radius: T },
    Simplex { dim: usize },
}

impl<T: Real> FeasibleSet<T> {
    pub fn whole_space(dim: usize) -> Self {
        FeasibleSet::WholeSpace { dim }
    }

    pub fn boxed(lo: Vec<T>, hi: Vec<T>) -> Result<Self> {
        let set = FeasibleSet::Box { lo, hi };
        set.validate()?;
        Ok(set)
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn l2_ball(center: Vec<T>, radius: T) -> Result<Self> {
        let set = FeasibleSet::L2Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn simplex(dim: usize) -> Result<Self> {
        let set = FeasibleSet::Simplex { dim };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FeasibleSet::WholeSpace { .. } => Ok(()),
            FeasibleSet::Box { lo, hi } => {
                if lo.len() != hi.len() {
                    return Err(Error::Dimension(format!(
                        "box bounds of length {} and {}",
                        lo.len(),
                        hi.len()
                    )));
                }
                match lo.iter().zip(hi).position(|(l, h)| !(l <= h)) {
                    Some(i) => Err(Error::Domain(format!(
                        "box lower bound exceeds upper bound at coordinate {i}"
                    ))),
                    None => Ok(()),
                }
            }
            FeasibleSet::L2Ball { center, radius } => {
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err(Error::Domain(format!("ball radius {radius} must be positive")));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::Domain("ball center must be finite".into()));
                }
                Ok(())
            }
            FeasibleSet::Simplex { dim } => {
                if *dim == 0 {
                    Err(Error::Domain("simplex dimension must be at least 1".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::WholeSpace { dim } | FeasibleSet::Simplex { dim } => *dim,
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::L2Ball { center, .. } => center.len(),
        }
    }

    /// Euclidean projection. Errors on non-finite input.
    pub fn project(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} projected onto a set of dimension {}",
                v.len(),
                self.dim()
            )));
        }
        match self {
            FeasibleSet::WholeSpace { .. } => {
                check_finite(v)?;
                Ok(v.to_vec())
            }
            FeasibleSet::Box { lo, hi } => project_box(v, lo, hi),
            FeasibleSet::L2Ball { center, radius } => project_l2_ball(v, center, *radius),
            FeasibleSet::Simplex { .. } => project_simplex(v),
        }
    }

    /// Membership within `tol`.
    pub fn contains(&self, v: &[T], tol: T) -> bool {
        if v.len() != self.dim() || v.iter().any(|x| !x.is_finite()) {
            return false;
        }
        match self {
            FeasibleSet::WholeSpace { .. } => true,
            FeasibleSet::Box { lo, hi } => v
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&x, (&l, &h))| x >= l - tol && x <= h + tol),
            FeasibleSet::L2Ball { center, radius } => dist(v, center) <= *radius + tol,
            FeasibleSet::Simplex { .. } => {
                let s: T = v.iter().copied().sum();
                (s - T::one()).abs() <= tol && v.iter().all(|&x| x >= -tol)
            }
        }
    }

    /// Euclidean diameter, `None` when unbounded.
    pub fn diameter(&self) -> Option<T> {
        match self {
            FeasibleSet::WholeSpace { .. } => None,
            FeasibleSet::Box { lo, hi } => {
                let d = dist(lo, hi);
                d.is_finite().then_some(d)
            }
            FeasibleSet::L2Ball { radius, .. } => Some(T::lit(2.0) * *radius),
            FeasibleSet::Simplex { dim } => Some(if *dim > 1 { T::lit(2.0).sqrt() } else { T::zero() }),
        }
    }

    pub fn is_compact(&self) -> bool {
        self.diameter().is_some()
    }

    /// Whether the set factors as a product over the given coordinate blocks,
    /// so that each block can be projected independently.
    pub fn is_product_over(&self, blocks: &[Range<usize>]) -> bool {
        match self {
            FeasibleSet::WholeSpace { .. } | FeasibleSet::Box { .. } => true,
            FeasibleSet::L2Ball { .. } | FeasibleSet::Simplex { .. } => {
                blocks.len() == 1 && blocks[0] == (0..self.dim())
            }
        }
    }

    /// Projects the coordinates `block` of a point onto the corresponding
    /// factor. Only valid when [`Self::is_product_over`] holds.
    pub fn project_block(&self, block: Range<usize>, v: &[T]) -> Result<Vec<T>> {
        if v.len() != block.len() {
            return Err(Error::Dimension("block slice length".into()));
        }
        match self {
            FeasibleSet::WholeSpace { .. } => {
                check_finite(v)?;
                Ok(v.to_vec())
            }
            FeasibleSet::Box { lo, hi } => project_box(v, &lo[block.clone()], &hi[block]),
            _ if block == (0..self.dim()) => self.project(v),
            _ => Err(Error::Config("feasible set is not a product over the declared blocks".into())),
        }
    }
}

fn check_finite<T: Real>(v: &[T]) -> Result<()> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(Error::Domain(format!("non-finite input at coordinate {i}"))),
        None => Ok(()),
    }
}

/// Projection onto the probability simplex by sorting and thresholding.
///
/// Sorts the coordinates in descending order (stable), finds the threshold
/// `τ` with `Σ max(v_i − τ, 0) = 1` and returns `max(v − τ, 0)`. Runs in
/// `O(d log d)`.
pub fn project_simplex<T: Real>(v: &[T]) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(Error::Domain("simplex projection of an empty vector".into()));
    }
    check_finite(v)?;
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));

    let tau = if v.len() > COMPENSATED_SUM_DIM {
        simplex_threshold_compensated(&sorted)
    } else {
        simplex_threshold(&sorted)
    };
    Ok(v.iter().map(|&x| (x - tau).max(T::zero())).collect())
}

fn simplex_threshold<T: Real>(sorted: &[T]) -> T {
    let mut cumsum = T::zero();
    let mut tau = sorted[0] - T::one();
    for (k, &u) in sorted.iter().enumerate() {
        cumsum = cumsum + u;
        let candidate = (cumsum - T::one()) / T::count(k + 1);
        if u - candidate > T::zero() {
            tau = candidate;
        } else {
            break;
        }
    }
    tau
}

fn simplex_threshold_compensated<T: Real>(sorted: &[T]) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut tau = sorted[0] - T::one();
    for (k, &u) in sorted.iter().enumerate() {
        let t = sum + u;
        comp = comp + if sum.abs() >= u.abs() { (sum - t) + u } else { (u - t) + sum };
        sum = t;
        let candidate = (compensated_sum([sum, comp, -T::one()])) / T::count(k + 1);
        if u - candidate > T::zero() {
            tau = candidate;
        } else {
            break;
        }
    }
    tau
}

/// Coordinatewise clamp of `v` to `[lo, hi]`.
pub fn project_box<T: Real>(v: &[T], lo: &[T], hi: &[T]) -> Result<Vec<T>> {
    if v.len() != lo.len() || v.len() != hi.len() {
        return Err(Error::Dimension("box bounds and vector lengths differ".into()));
    }
    if let Some(i) = lo.iter().zip(hi).position(|(l, h)| !(l <= h)) {
        return Err(Error::Domain(format!(
            "box lower bound exceeds upper bound at coordinate {i}"
        )));
    }
    check_finite(v)?;
    Ok(v.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&x, (&l, &h))| x.max(l).min(h))
        .collect())
}

/// Radial projection onto the ball of radius `r` around `center`.
pub fn project_l2_ball<T: Real>(v: &[T], center: &[T], r: T) -> Result<Vec<T>> {
    if v.len() != center.len() {
        return Err(Error::Dimension("ball center and vector lengths differ".into()));
    }
    if !(r > T::zero()) {
        return Err(Error::Domain(format!("ball radius {r} must be positive")));
    }
    check_finite(v)?;
    let d = dist(v, center);
    if d <= r {
        return Ok(v.to_vec());
    }
    let s = r / d;
    Ok(v.iter().zip(center).map(|(&x, &c)| c + s * (x - c)).collect())
}
