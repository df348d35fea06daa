use serde::{Deserialize, Serialize};

use super::{Bilinear, Component, FiniteMaxProblem, Quadratic};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::problem::{MinMaxProblem, Region};
use crate::projections::FeasibleSet;
use crate::scalar::Real;

/// Serialized quadratic `½xᵀAx + bᵀx + c`, `A` row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadraticDoc {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

/// Region bounds; `null` entries are infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub lo: Vec<Option<f64>>,
    pub hi: Vec<Option<f64>>,
}

/// JSON form of a problem instance. Stored constants are restored verbatim
/// on load so a reloaded instance reproduces runs exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceDoc {
    FiniteMax {
        id: String,
        n: usize,
        seed: Option<u64>,
        components: Vec<QuadraticDoc>,
        x_set: FeasibleSet<f64>,
        region: RegionDoc,
        lipschitz: f64,
        hessian_bound: f64,
        weak_convexity: f64,
        lower_bound: Option<f64>,
    },
    Bilinear {
        n: usize,
        m: usize,
        a: Vec<f64>,
        b: Vec<f64>,
        d: Vec<f64>,
        x_set: FeasibleSet<f64>,
        y_set: FeasibleSet<f64>,
        region: RegionDoc,
        lipschitz: f64,
    },
}

fn to_f64<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.as_f64()).collect()
}

fn from_f64<T: Real>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

fn set_to_f64<T: Real>(set: &FeasibleSet<T>) -> FeasibleSet<f64> {
    match set {
        FeasibleSet::WholeSpace { dim } => FeasibleSet::WholeSpace { dim: *dim },
        FeasibleSet::Box { lo, hi } => FeasibleSet::Box { lo: to_f64(lo), hi: to_f64(hi) },
        FeasibleSet::L2Ball { center, radius } => {
            FeasibleSet::L2Ball { center: to_f64(center), radius: radius.as_f64() }
        }
        FeasibleSet::Simplex { dim } => FeasibleSet::Simplex { dim: *dim },
    }
}

fn set_from_f64<T: Real>(set: &FeasibleSet<f64>) -> Result<FeasibleSet<T>> {
    let out = match set {
        FeasibleSet::WholeSpace { dim } => FeasibleSet::WholeSpace { dim: *dim },
        FeasibleSet::Box { lo, hi } => FeasibleSet::Box { lo: from_f64(lo), hi: from_f64(hi) },
        FeasibleSet::L2Ball { center, radius } => {
            FeasibleSet::L2Ball { center: from_f64(center), radius: T::lit(*radius) }
        }
        FeasibleSet::Simplex { dim } => FeasibleSet::Simplex { dim: *dim },
    };
    out.validate()?;
    Ok(out)
}

fn region_doc<T: Real>(region: &Region<T>) -> RegionDoc {
    let enc = |v: &[T]| v.iter().map(|x| x.is_finite().then(|| x.as_f64())).collect();
    RegionDoc { lo: enc(region.lo()), hi: enc(region.hi()) }
}

fn region_from_doc<T: Real>(doc: &RegionDoc) -> Result<Region<T>> {
    let lo = doc.lo.iter().map(|v| v.map_or(T::neg_infinity(), T::lit)).collect();
    let hi = doc.hi.iter().map(|v| v.map_or(T::infinity(), T::lit)).collect();
    Region::new(lo, hi)
}

fn square<T: Real>(n: usize, data: &[f64]) -> Result<Matrix<T>> {
    Matrix::from_row_major(n, n, from_f64(data))
}

impl InstanceDoc {
    pub fn from_finite_max<T: Real>(problem: &FiniteMaxProblem<T>) -> Result<Self> {
        let components = problem
            .components()
            .iter()
            .map(|c| match c {
                Component::Quadratic(q) => Ok(QuadraticDoc {
                    a: to_f64(q.matrix().as_slice()),
                    b: to_f64(q.linear()),
                    c: q.offset().as_f64(),
                }),
                Component::Smooth(_) => {
                    Err(Error::Unsupported("only quadratic components can be serialized".into()))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InstanceDoc::FiniteMax {
            id: problem.id().to_string(),
            n: problem.dim_x(),
            seed: problem.seed(),
            components,
            x_set: set_to_f64(problem.x_set()),
            region: region_doc(problem.region()),
            lipschitz: problem.lipschitz().as_f64(),
            hessian_bound: problem.hessian_bound().as_f64(),
            weak_convexity: problem.weak_convexity().as_f64(),
            lower_bound: problem.lower_bound().map(Real::as_f64),
        })
    }

    pub fn from_bilinear<T: Real>(problem: &Bilinear<T>) -> Self {
        InstanceDoc::Bilinear {
            n: problem.dim_x(),
            m: problem.dim_y(),
            a: to_f64(problem.matrix().as_slice()),
            b: to_f64(problem.b()),
            d: to_f64(problem.d()),
            x_set: set_to_f64(problem.x_set()),
            y_set: set_to_f64(problem.y_set()),
            region: region_doc(problem.region()),
            lipschitz: problem.lipschitz().as_f64(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn finite_max<T: Real>(&self) -> Result<FiniteMaxProblem<T>> {
        let InstanceDoc::FiniteMax {
            id,
            n,
            seed,
            components,
            x_set,
            region,
            lipschitz,
            hessian_bound,
            weak_convexity,
            lower_bound,
        } = self
        else {
            return Err(Error::Serialization("instance is not finite_max".into()));
        };
        let components = components
            .iter()
            .map(|q| Ok(Component::Quadratic(Quadratic::new(square(*n, &q.a)?, from_f64(&q.b), T::lit(q.c))?)))
            .collect::<Result<Vec<_>>>()?;
        let mut problem = FiniteMaxProblem::from_components(
            components,
            set_from_f64(x_set)?,
            region_from_doc(region)?,
            T::lit(*lipschitz),
            T::lit(*hessian_bound),
            T::lit(*weak_convexity),
        )?
        .with_id(id.clone());
        problem.seed = *seed;
        problem.lower_bound = lower_bound.map(T::lit);
        Ok(problem)
    }

    pub fn bilinear<T: Real>(&self) -> Result<Bilinear<T>> {
        let InstanceDoc::Bilinear { n, m, a, b, d, x_set, y_set, region, lipschitz } = self else {
            return Err(Error::Serialization("instance is not bilinear".into()));
        };
        let mut problem = super::make_bilinear(
            Matrix::from_row_major(*n, *m, from_f64(a))?,
            from_f64(b),
            from_f64(d),
            set_from_f64(x_set)?,
            set_from_f64(y_set)?,
        )?
        .with_region(region_from_doc(region)?)?;
        if !(*lipschitz > 0.0) {
            return Err(Error::Serialization("stored Lipschitz constant must be positive".into()));
        }
        problem.lipschitz = T::lit(*lipschitz);
        Ok(problem)
    }
}
