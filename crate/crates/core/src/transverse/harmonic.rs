//! Effective potential on the constraint for harmonic transverse modes.

use crate::error::{Error, Result};

/// E_n(x) = sum_i (n_i + 1/2) omega_i(x) / a_i + V(x).
///
/// `omegas` are the transverse frequencies at the base point, `squeeze` the
/// per-direction squeeze parameters a_i, `n` the transverse mode index.
pub fn harmonic_effective_potential(
    omegas: &[f64],
    squeeze: &[f64],
    n: &[usize],
    v: f64,
) -> Result<f64> {
    if omegas.len() != squeeze.len() || omegas.len() != n.len() {
        return Err(Error::DimensionMismatch(format!(
            "effective potential: {} frequencies, {} squeeze params, {} mode indices",
            omegas.len(),
            squeeze.len(),
            n.len()
        )));
    }
    let mut e = v;
    for i in 0..omegas.len() {
        if omegas[i] <= 0.0 {
            return Err(Error::ConfinementViolation { omega: omegas[i] });
        }
        let theta = (n[i] as f64 + 0.5) / squeeze[i];
        e += theta * omegas[i];
    }
    Ok(e)
}
