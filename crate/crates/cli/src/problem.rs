use std::sync::Arc;

use smoothgda::problem::{even_blocks, Blocked};
use smoothgda::problems::{
    self, make_bilinear, make_finite_max_quadratic, make_robust_regression, InstanceDoc,
    Quadratic, RegressionMap,
};
use smoothgda::{Error, FeasibleSet, FiniteMax, FnProblem, Mat, MinMaxProblem, Region};

use crate::config::{Bounds, ExperimentConfig, ProblemSpec};
use crate::error::CliError;

pub type DynProblem = Arc<dyn MinMaxProblem<f64>>;

pub struct Built {
    pub id: String,
    pub problem: DynProblem,
}

fn field(name: &str, err: Error) -> CliError {
    match CliError::from(err) {
        CliError::Config(msg) => CliError::Config(format!("invalid field `{name}`: {msg}")),
        other => other,
    }
}

fn region(bounds: &Bounds, n: usize) -> Result<Region<f64>, CliError> {
    Region::new(bounds.lo.expand(n), bounds.hi.expand(n)).map_err(|e| field("problem.region", e))
}

fn matrix(rows: &[Vec<f64>], name: &str) -> Result<Mat, CliError> {
    Mat::from_rows(rows).map_err(|e| field(name, e))
}

/// Instantiates the configured problem. Instances that need a seed use
/// `config.seed`.
pub fn build(config: &ExperimentConfig) -> Result<Built, CliError> {
    let (id, problem): (String, DynProblem) = match &config.problem {
        ProblemSpec::Zero { n, y_set } => {
            let p = FnProblem::zero(FeasibleSet::whole_space(*n), y_set.clone())
                .map_err(|e| field("problem.y_set", e))?;
            (format!("zero-n{n}"), Arc::new(p))
        }
        ProblemSpec::Bilinear { a, b, d, x_set, y_set, region: r } => {
            let a = matrix(a, "problem.a")?;
            let b = b.clone().unwrap_or_else(|| vec![0.0; a.rows()]);
            let d = d.clone().unwrap_or_else(|| vec![0.0; a.cols()]);
            let mut p = make_bilinear(a, b, d, x_set.clone(), y_set.clone())
                .map_err(|e| field("problem", e))?;
            if let Some(r) = r {
                let reg = region(r, p.dim_x())?;
                p = p.with_region(reg).map_err(|e| field("problem.region", e))?;
            }
            ("bilinear".to_string(), Arc::new(p))
        }
        ProblemSpec::FiniteMax { components, x_set, region: r } => {
            let quads = components
                .iter()
                .enumerate()
                .map(|(i, q)| {
                    let name = format!("problem.components[{i}]");
                    Quadratic::new(matrix(&q.a, &name)?, q.b.clone(), q.c).map_err(|e| field(&name, e))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let n = quads[..].first().map_or(0, |q| q.linear().len());
            let reg = region(r, n)?;
            let x = x_set.clone().unwrap_or_else(|| reg.as_set());
            let p = FiniteMax::from_quadratics(quads, x, reg).map_err(|e| field("problem", e))?;
            ("finite-max".to_string(), Arc::new(p))
        }
        ProblemSpec::Hand { instance } => {
            let p: FiniteMax = match instance.as_str() {
                "two-component" => problems::hand_two_component()?,
                "three-component" => problems::hand_three_component()?,
                other => {
                    return Err(CliError::Config(format!(
                        "invalid field `problem.instance`: unknown hand instance `{other}` \
                         (expected two-component or three-component)"
                    )))
                }
            };
            (p.id().to_string(), Arc::new(p))
        }
        ProblemSpec::FiniteMaxRandom { n, m, generator } => {
            generator.validate().map_err(|e| field("problem.generator", e))?;
            let p: FiniteMax = make_finite_max_quadratic(*n, *m, config.seed, generator)
                .map_err(|e| field("problem", e))?;
            (p.id().to_string(), Arc::new(p))
        }
        ProblemSpec::RobustRegression { data, region: r, x_set } => {
            let n = data.first().map_or(0, |d| d.xi.len());
            let reg = region(r, n)?;
            let x = x_set.clone().unwrap_or_else(|| reg.as_set());
            let pts: Vec<(Vec<f64>, f64)> = data.iter().map(|d| (d.xi.clone(), d.label)).collect();
            let p = make_robust_regression(&pts, RegressionMap::Linear, x, reg)
                .map_err(|e| field("problem.data", e))?;
            ("robust-regression".to_string(), Arc::new(p))
        }
        ProblemSpec::File { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Config(format!("invalid field `problem.path`: cannot read {}: {e}", path.display()))
            })?;
            let doc = InstanceDoc::from_json(&text).map_err(|e| field("problem.path", e))?;
            match doc {
                InstanceDoc::FiniteMax { .. } => {
                    let p: FiniteMax = doc.finite_max().map_err(|e| field("problem.path", e))?;
                    (p.id().to_string(), Arc::new(p))
                }
                InstanceDoc::Bilinear { .. } => {
                    let p = doc.bilinear::<f64>().map_err(|e| field("problem.path", e))?;
                    ("bilinear".to_string(), Arc::new(p))
                }
            }
        }
        ProblemSpec::SyntheticPowerLaw { .. } => {
            return Err(CliError::Config(
                "invalid field `problem.kind`: synthetic_power_law is only accepted by `rate`".into(),
            ))
        }
    };
    let problem = match config.blocks {
        Some(count) if count > 1 || config.algorithm == smoothgda::Algorithm::SmoothedBgda => {
            let n = problem.dim_x();
            if count > n {
                return Err(CliError::Config(format!("invalid field `blocks`: {count} blocks for n = {n}")));
            }
            let blocked = Blocked::new(problem, even_blocks(n, count)).map_err(|e| field("blocks", e))?;
            Arc::new(blocked) as DynProblem
        }
        _ => problem,
    };
    Ok(Built { id, problem })
}

/// Default start: `x⁰ = P_X(0)`, `y⁰` the projection of the uniform vector
/// `1/m`, `z⁰ = x⁰`.
pub fn default_start(problem: &dyn MinMaxProblem<f64>) -> (Vec<f64>, Vec<f64>) {
    let m = problem.dim_y();
    (vec![0.0; problem.dim_x()], vec![1.0 / m.max(1) as f64; m])
}
