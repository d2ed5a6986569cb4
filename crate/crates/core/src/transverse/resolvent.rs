//! Reduced resolvent at a transverse eigenstate: the bounded inverse of
//! (h - E) restricted to the orthogonal complement of the eigenstate,
//! applied by spectral expansion over the transverse eigenbasis.

use crate::error::{Error, Result};
use crate::numerics::{oscillator_eigenfunctions, trapezoid};

const ORTHOGONALITY_TOL: f64 = 1e-8;

/// Apply the reduced resolvent of a harmonic transverse Hamiltonian with
/// effective frequency `beta` (= omega/a, level spacing beta) at level
/// `mode`, to `rhs` sampled on the uniform grid `us`. The rhs must be
/// orthogonal to the mode. Expansion uses levels 0..n_basis.
pub fn reduced_resolvent_apply_harmonic(
    beta: f64,
    mode: usize,
    us: &[f64],
    rhs: &[f64],
    n_basis: usize,
) -> Result<Vec<f64>> {
    let h = us[1] - us[0];
    let basis: Vec<Vec<f64>> = {
        let mut cols = vec![Vec::with_capacity(us.len()); n_basis + 1];
        for &u in us {
            let vals = oscillator_eigenfunctions(n_basis, beta, u);
            for (c, v) in cols.iter_mut().zip(vals) {
                c.push(v);
            }
        }
        cols
    };
    let energies: Vec<f64> = (0..=n_basis).map(|n| (n as f64 + 0.5) * beta).collect();
    reduced_resolvent_apply(&basis, &energies, mode, rhs, h)
}

/// Generic spectral form: psi = sum_{n != mode} <phi_n, rhs> / (E_n - E_mode)
/// * phi_n over a supplied orthonormal sampled eigenbasis.
pub fn reduced_resolvent_apply(
    basis: &[Vec<f64>],
    energies: &[f64],
    mode: usize,
    rhs: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    if basis.len() != energies.len() || mode >= basis.len() {
        return Err(Error::DimensionMismatch("resolvent basis/energies".into()));
    }
    let rhs_norm = (h * rhs.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let mut out = vec![0.0; rhs.len()];
    for (n, (phi, &e)) in basis.iter().zip(energies).enumerate() {
        let prod: Vec<f64> = phi.iter().zip(rhs).map(|(a, b)| a * b).collect();
        let c = trapezoid(&prod, h);
        if n == mode {
            if c.abs() > ORTHOGONALITY_TOL * rhs_norm.max(1e-300) {
                return Err(Error::NotOrthogonal { overlap: c });
            }
            continue;
        }
        let w = c / (e - energies[mode]);
        for (o, p) in out.iter_mut().zip(phi) {
            *o += w * p;
        }
    }
    Ok(out)
}
