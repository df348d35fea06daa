use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{IterateTrace, ResidualKind, SolverParams};

#[derive(Debug, Clone, PartialEq)]
pub struct DecreaseReport<T> {
    /// `(t, margin)` for each step `t−1 → t` with potentials on both ends.
    pub margins: Vec<(usize, T)>,
    pub min_margin: Option<T>,
}

/// Per-step margin
/// `(φᵗ − φᵗ⁺¹) − [rx²/(16c) + ry²/(16α) + pβ·rz²/16]`
/// over consecutive trace records carrying the potential and exact residuals.
pub fn check_sufficient_decrease<T: Real>(
    trace: &IterateTrace<T>,
    params: &SolverParams<T>,
) -> Result<DecreaseReport<T>> {
    let sixteen = T::lit(16.0);
    let mut margins = Vec::new();
    let mut saw_phi = false;
    for pair in trace.records().windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        saw_phi |= a.phi.is_some() || b.phi.is_some();
        let (Some(phi_a), Some(phi_b)) = (a.phi, b.phi) else { continue };
        if b.t != a.t + 1 || b.ry_kind != ResidualKind::Exact {
            continue;
        }
        let required = b.rx * b.rx / (sixteen * params.c)
            + b.ry * b.ry / (sixteen * params.alpha)
            + params.p * params.beta * b.rz * b.rz / sixteen;
        margins.push((b.t, (phi_a - phi_b) - required));
    }
    if !saw_phi {
        return Err(Error::Usage("trace carries no potential values".into()));
    }
    let min_margin = margins.iter().map(|&(_, m)| m).reduce(T::min);
    Ok(DecreaseReport { margins, min_margin })
}
