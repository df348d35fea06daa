use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Constants of the convergence analysis for given `(L, p, c, α, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Constants<T> {
    /// `p/(p−L)`: Lipschitz modulus of `x(y, ·)`.
    pub sigma1: T,
    /// `2(p+L)/(p−L)`: Lipschitz modulus of `x(·, z)`.
    pub sigma2: T,
    /// `(1+c(p−L))/(c(p−L))`: primal step error factor.
    pub sigma3: T,
    /// Multi-block version of `sigma3` with the `c(p+L)N^{3/2}` coupling.
    pub sigma3_multi: T,
    /// `L + Lσ₂`: Lipschitz constant of `∇_y d(·, z)`.
    pub l_d: T,
    /// `αLσ₃` (with `σ₃'` when `N > 1`).
    pub kappa: T,
    /// `(2+κ)(L+1/α) + p + 1/(2c)`.
    pub lambda_bar: T,
}

pub fn constants<T: Real>(lipschitz: T, p: T, c: T, alpha: T, blocks: usize) -> Result<Constants<T>> {
    let l = lipschitz;
    if !(p > l) {
        return Err(Error::Parameter(format!("constants need p > L (p = {p}, L = {l})")));
    }
    if !(c > T::zero()) || !(alpha > T::zero()) {
        return Err(Error::Parameter("constants need c > 0 and alpha > 0".into()));
    }
    let two = T::lit(2.0);
    let gap = p - l;
    let sigma1 = p / gap;
    let sigma2 = two * (p + l) / gap;
    let sigma3 = (T::one() + c * gap) / (c * gap);
    let n = T::count(blocks.max(1));
    let sigma3_multi = (c * gap + T::one() + c * (l + p) * n.powf(T::lit(1.5))) / (c * gap);
    let l_d = l + l * sigma2;
    let kappa = alpha * l * if blocks > 1 { sigma3_multi } else { sigma3 };
    let lambda_bar = (two + kappa) * (l + T::one() / alpha) + p + T::one() / (two * c);
    Ok(Constants { sigma1, sigma2, sigma3, sigma3_multi, l_d, kappa, lambda_bar })
}
