use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smoothgda::problems::GeneratorSpec;
use smoothgda::{Algorithm, Set};

use crate::error::CliError;

/// One experiment, read from a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub algorithm: Algorithm,
    #[serde(default)]
    pub params: ParamsSpec,
    pub horizon: Horizon,
    /// Planned horizon `T`; caps `β` at `0.99/√T`.
    #[serde(default, rename = "theorem1_T")]
    pub theorem1_t: Option<usize>,
    #[serde(default)]
    pub diagnostics: DiagnosticsSpec,
    #[serde(default)]
    pub seed: u64,
    /// Used when no `--out` is given on the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub initial: Option<InitialPoint>,
    /// Number of equal primal blocks for smoothed-bgda.
    #[serde(default)]
    pub blocks: Option<usize>,
    #[serde(default = "one")]
    pub stride: usize,
    /// Record per-step wall-clock time in the `wall_ns` column.
    #[serde(default)]
    pub wall_clock: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `f ≡ 0` on `ℝⁿ × Y`.
    Zero { n: usize, y_set: Set },
    /// `xᵀAy + bᵀx + dᵀy`; `A` given as rows.
    Bilinear {
        a: Vec<Vec<f64>>,
        #[serde(default)]
        b: Option<Vec<f64>>,
        #[serde(default)]
        d: Option<Vec<f64>>,
        x_set: Set,
        y_set: Set,
        #[serde(default)]
        region: Option<Bounds>,
    },
    /// Quadratic components `½xᵀA_i x + b_iᵀx + c_i` over the simplex.
    FiniteMax {
        components: Vec<QuadraticSpec>,
        #[serde(default)]
        x_set: Option<Set>,
        region: Bounds,
    },
    /// Built-in instances with known solutions: `two-component` or
    /// `three-component`.
    Hand { instance: String },
    /// Seeded random finite-max quadratics; the seed is the config seed.
    FiniteMaxRandom {
        n: usize,
        m: usize,
        #[serde(default)]
        generator: GeneratorSpec,
    },
    /// `max_i ½(ℓ_i − ξ_iᵀx)²`.
    RobustRegression { data: Vec<DataPoint>, region: Bounds, #[serde(default)] x_set: Option<Set> },
    /// Instance file written by the library's JSON serializer.
    File { path: PathBuf },
    /// Residual sequence `t^(−exponent)`, for exercising rate fitting.
    SyntheticPowerLaw { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    #[serde(default)]
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPoint {
    pub xi: Vec<f64>,
    pub label: f64,
}

/// Box `[lo, hi]`; scalar bounds apply to every coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lo: Bound,
    pub hi: Bound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bound {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Bound {
    pub fn expand(&self, n: usize) -> Vec<f64> {
        match self {
            Bound::Scalar(v) => vec![*v; n],
            Bound::Vector(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ParamsSpec {
    Auto {
        #[serde(default = "default_safety")]
        safety: f64,
    },
    Explicit { p: f64, c: f64, alpha: f64, beta: f64 },
}

fn default_safety() -> f64 {
    smoothgda::solvers::DEFAULT_SAFETY
}

impl Default for ParamsSpec {
    fn default() -> Self {
        ParamsSpec::Auto { safety: default_safety() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Horizon {
    pub max_iter: usize,
    #[serde(default)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticsSpec {
    /// Replace the surrogate `ry` by the exact residual every `k` steps.
    #[serde(default)]
    pub exact_every: Option<usize>,
    /// Record the potential every `k` steps.
    #[serde(default)]
    pub potential_every: Option<usize>,
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    /// Evaluate `ψ` numerically where the problem has no closed form.
    #[serde(default)]
    pub psi: bool,
}

fn default_inner_tol() -> f64 {
    smoothgda::diagnostics::DEFAULT_INNER_TOL
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec { exact_every: None, potential_every: None, inner_tol: default_inner_tol(), psi: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialPoint {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    #[serde(default)]
    pub z: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config = Self::parse(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("invalid field `{path}`: {}", e.inner()))
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let field = |name: &str, msg: &str| Err(CliError::Config(format!("invalid field `{name}`: {msg}")));
        if self.stride == 0 {
            return field("stride", "must be at least 1");
        }
        if self.diagnostics.exact_every == Some(0) {
            return field("diagnostics.exact_every", "must be at least 1");
        }
        if self.diagnostics.potential_every == Some(0) {
            return field("diagnostics.potential_every", "must be at least 1");
        }
        if !(self.diagnostics.inner_tol > 0.0 && self.diagnostics.inner_tol < 1.0) {
            return field("diagnostics.inner_tol", "must lie in (0, 1)");
        }
        if !(self.horizon.tol >= 0.0) {
            return field("horizon.tol", "must be nonnegative");
        }
        if self.blocks == Some(0) {
            return field("blocks", "must be at least 1");
        }
        if self.theorem1_t == Some(0) {
            return field("theorem1_T", "must be at least 1");
        }
        if self.algorithm == Algorithm::SmoothedBgda && self.blocks.is_none() {
            return field("blocks", "smoothed-bgda needs a block count");
        }
        if let ParamsSpec::Auto { safety } = self.params {
            if !(safety > 0.0 && safety < 1.0) {
                return field("params.auto.safety", "must lie in (0, 1)");
            }
        }
        Ok(())
    }
}
