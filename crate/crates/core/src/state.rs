//! Parameters, iterates and trace records shared by solvers and diagnostics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::MinMaxProblem;
use crate::scalar::Real;

/// Step sizes and smoothing weights `(p, c, α, β)` plus the block count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SolverParams<T> {
    /// Smoothing strength.
    pub p: T,
    /// Primal step.
    pub c: T,
    /// Dual step.
    pub alpha: T,
    /// Averaging weight for the smoothing center, in (0, 1].
    pub beta: T,
    /// Block count (1 for the single-block algorithm).
    pub blocks: usize,
}

/// Upper bound on `α` that keeps the sufficient-decrease analysis valid.
/// For `N > 1` the block-coupling term `c(p+L)N^{3/2}` enters the denominator.
pub fn alpha_bound<T: Real>(lipschitz: T, p: T, c: T, blocks: usize) -> T {
    let l = lipschitz;
    let gap = p - l;
    let mut denom = T::one() + c * gap;
    if blocks > 1 {
        denom = denom + c * (p + l) * T::count(blocks).powf(T::lit(1.5));
    }
    let coupled = c * c * gap * gap / (T::lit(4.0) * l * denom * denom);
    (T::one() / (T::lit(11.0) * l)).min(coupled)
}

/// Upper bound on `β`: `min{1/36, (p−L)²/(384 p (p+L)²)}`.
pub fn beta_bound<T: Real>(lipschitz: T, p: T) -> T {
    let l = lipschitz;
    let gap = p - l;
    (T::one() / T::lit(36.0)).min(gap * gap / (T::lit(384.0) * p * (p + l) * (p + l)))
}

impl<T: Real> SolverParams<T> {
    pub fn new(p: T, c: T, alpha: T, beta: T) -> Self {
        SolverParams { p, c, alpha, beta, blocks: 1 }
    }

    pub fn with_blocks(mut self, blocks: usize) -> Self {
        self.blocks = blocks;
        self
    }

    /// Positivity and range checks every solver needs.
    pub fn validate(&self) -> Result<()> {
        let finite = [self.p, self.c, self.alpha, self.beta].iter().all(|v| v.is_finite());
        if !finite || self.p < T::zero() || self.c < T::zero() || self.alpha < T::zero() {
            return Err(Error::Parameter(format!("parameters must be finite and nonnegative: {self:?}")));
        }
        if !(self.beta > T::zero() && self.beta <= T::one()) {
            return Err(Error::Parameter(format!("beta = {} must lie in (0, 1]", self.beta)));
        }
        if self.blocks == 0 {
            return Err(Error::Parameter("block count must be at least 1".into()));
        }
        Ok(())
    }

    /// Conditions that fail the convergence theory for Lipschitz constant `L`.
    /// Empty when the parameters are theory-compliant.
    pub fn theory_violations(&self, lipschitz: T) -> Vec<String> {
        let l = lipschitz;
        let mut out = Vec::new();
        if !(self.p > T::lit(3.0) * l) {
            out.push(format!("p = {} must exceed 3L = {}", self.p, T::lit(3.0) * l));
            return out;
        }
        if !(self.c < T::one() / (self.p + l)) {
            out.push(format!("c = {} must be below 1/(p+L) = {}", self.c, T::one() / (self.p + l)));
        }
        if !(self.c > T::zero()) {
            out.push("c must be positive".into());
        }
        let ab = alpha_bound(l, self.p, self.c, self.blocks);
        let alpha_ok = if self.blocks > 1 { self.alpha <= ab } else { self.alpha < ab };
        if !alpha_ok || !(self.alpha > T::zero()) {
            out.push(format!("alpha = {} violates bound {}", self.alpha, ab));
        }
        let bb = beta_bound(l, self.p);
        if !(self.beta <= bb) || !(self.beta > T::zero()) {
            out.push(format!("beta = {} violates bound {}", self.beta, bb));
        }
        out
    }

    pub fn is_theory_compliant(&self, lipschitz: T) -> bool {
        self.theory_violations(lipschitz).is_empty()
    }
}

/// Iterates `(x, y, z)` and the iteration counter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct SolverState<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Smoothing center.
    pub z: Vec<T>,
    pub t: usize,
}

impl<T: Real> SolverState<T> {
    /// Projects the starting point onto `X × Y`; `z` defaults to the
    /// projected `x`.
    pub fn initial<P: MinMaxProblem<T> + ?Sized>(
        problem: &P,
        x0: &[T],
        y0: &[T],
        z0: Option<&[T]>,
    ) -> Result<Self> {
        if x0.len() != problem.dim_x() || y0.len() != problem.dim_y() {
            return Err(Error::Dimension("initial point does not match problem dimensions".into()));
        }
        let x = problem.project_x(x0)?;
        let y = problem.project_y(y0)?;
        let z = match z0 {
            Some(z) if z.len() == x.len() => z.to_vec(),
            Some(_) => return Err(Error::Dimension("z0 length differs from n".into())),
            None => x.clone(),
        };
        Ok(SolverState { x, y, z, t: 0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualKind {
    /// `ry = ‖y − y₊(z)‖` computed with an inner argmin.
    Exact,
    /// `ry = ‖yᵗ − yᵗ⁺¹‖ + κ·rx`, an upper bound on the exact value.
    Surrogate,
    /// `ry = ‖yᵗ − yᵗ⁺¹‖` for plain GDA, where no smoothing constant exists.
    Step,
}

impl fmt::Display for ResidualKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidualKind::Exact => "exact",
            ResidualKind::Surrogate => "surrogate",
            ResidualKind::Step => "step",
        })
    }
}

/// Residual triple of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T> {
    /// `‖xᵗ − xᵗ⁺¹‖`
    pub rx: T,
    pub ry: T,
    /// `‖xᵗ⁺¹ − zᵗ‖`
    pub rz: T,
    pub kind: ResidualKind,
}

impl<T: Real> Residuals<T> {
    pub fn max(&self) -> T {
        self.rx.max(self.ry).max(self.rz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gda,
    SmoothedGda,
    SmoothedBgda,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Gda => "gda",
            Algorithm::SmoothedGda => "smoothed-gda",
            Algorithm::SmoothedBgda => "smoothed-bgda",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gda" => Ok(Algorithm::Gda),
            "smoothed-gda" => Ok(Algorithm::SmoothedGda),
            "smoothed-bgda" => Ok(Algorithm::SmoothedBgda),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// One row of an iterate trace, describing the step that produced iterate `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord<T> {
    pub t: usize,
    pub rx: T,
    pub ry: T,
    pub ry_kind: ResidualKind,
    pub rz: T,
    /// The stopping measure evaluated at this step.
    pub measure: T,
    pub f: T,
    pub psi: Option<T>,
    pub phi: Option<T>,
    pub wall_ns: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TraceMeta<T> {
    pub problem_id: String,
    pub algorithm: Option<Algorithm>,
    pub params: Option<SolverParams<T>>,
    pub seed: Option<u64>,
}

/// Ordered per-iteration records plus run metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterateTrace<T> {
    pub meta: TraceMeta<T>,
    records: Vec<TraceRecord<T>>,
}

impl<T: Real> IterateTrace<T> {
    pub fn new(meta: TraceMeta<T>) -> Self {
        IterateTrace { meta, records: Vec::new() }
    }

    /// Appends a record; `t` must exceed the last recorded `t`.
    pub fn push(&mut self, record: TraceRecord<T>) -> Result<()> {
        if let Some(last) = self.records.last() {
            if record.t <= last.t {
                return Err(Error::Usage(format!(
                    "trace records must be strictly ordered (t={} after t={})",
                    record.t, last.t
                )));
            }
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[TraceRecord<T>] {
        &self.records
    }

    pub fn records_mut(&mut self) -> &mut [TraceRecord<T>] {
        &mut self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord<T>> {
        self.records.last()
    }

    /// Builds a trace from a plain residual sequence, one record per `t`
    /// starting at 1. Used to feed synthetic sequences into rate fitting.
    pub fn from_measures(meta: TraceMeta<T>, measures: &[T]) -> Self {
        let records = measures
            .iter()
            .enumerate()
            .map(|(i, &r)| TraceRecord {
                t: i + 1,
                rx: r,
                ry: T::zero(),
                ry_kind: ResidualKind::Surrogate,
                rz: T::zero(),
                measure: r,
                f: T::zero(),
                psi: None,
                phi: None,
                wall_ns: None,
            })
            .collect();
        IterateTrace { meta, records }
    }
}
