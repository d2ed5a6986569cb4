use num_complex::Complex64;

use super::grid::Grid2D;
use super::splitstep::Fft2;
use crate::error::{Error, Result};
use crate::geometry::TubularChart;

/// Periodic rectangular grid in chart coordinates: s along the base, u the
/// dilated normal variable. Used only for residual diagnostics, so both
/// directions are treated as periodic; the state must decay (or wrap) before
/// the edges.
#[derive(Debug, Clone, Copy)]
pub struct TubGrid {
    pub s0: f64,
    pub s1: f64,
    pub ns: usize,
    pub u_half: f64,
    pub nu: usize,
}

impl TubGrid {
    pub fn new(s_range: (f64, f64), ns: usize, u_half: f64, nu: usize) -> Result<Self> {
        if !(s_range.1 > s_range.0) || !(u_half > 0.0) {
            return Err(Error::Config("degenerate tubular grid ranges".into()));
        }
        if !ns.is_power_of_two() || !nu.is_power_of_two() {
            return Err(Error::Config(format!("grid sizes {ns}x{nu} must be powers of two")));
        }
        Ok(Self { s0: s_range.0, s1: s_range.1, ns, u_half, nu })
    }

    pub fn ds(&self) -> f64 {
        (self.s1 - self.s0) / self.ns as f64
    }

    pub fn du(&self) -> f64 {
        2.0 * self.u_half / self.nu as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + i as f64 * self.ds()
    }

    pub fn u(&self, j: usize) -> f64 {
        -self.u_half + j as f64 * self.du()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nu + j
    }

    pub fn len(&self) -> usize {
        self.ns * self.nu
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn norm(&self, values: &[Complex64]) -> f64 {
        (values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.ds() * self.du()).sqrt()
    }
}

/// Spectral partial derivatives on the tubular grid.
fn spectral_derivs(
    grid: &TubGrid,
    psi: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let mut fft = Fft2::new(grid.ns, grid.nu);
    let mut hat = psi.to_vec();
    fft.forward(&mut hat);
    let ls = grid.s1 - grid.s0;
    let lu = 2.0 * grid.u_half;
    // spectral layout after forward() is u-major: idx = j_ku * ns + i_ks
    let mut ds_hat = hat.clone();
    let mut dss_hat = hat.clone();
    let mut duu_hat = hat;
    for j in 0..grid.nu {
        let ku = Grid2D::frequency(j, grid.nu, lu);
        for i in 0..grid.ns {
            let ks = Grid2D::frequency(i, grid.ns, ls);
            let idx = j * grid.ns + i;
            ds_hat[idx] *= Complex64::new(0.0, ks);
            dss_hat[idx] *= -ks * ks;
            duu_hat[idx] *= -ku * ku;
        }
    }
    fft.inverse(&mut ds_hat);
    fft.inverse(&mut dss_hat);
    fft.inverse(&mut duu_hat);
    (ds_hat, dss_hat, duu_hat)
}

/// Applies the chart-coordinate Hamiltonian
/// H = -hbar^2/(2 w^2) dss - hbar^3 k' u / w^3 ds - hbar^2 Q(s, hbar u)
///     - (1/2) duu + V_transverse(s, u)
/// with w = 1 - k(s) hbar u; a straight chart (None) drops the curvature
/// terms. `transverse_potential` takes (s, dilated u) and must include the
/// confinement scaling.
pub fn apply_h_bo(
    grid: &TubGrid,
    chart: Option<&TubularChart>,
    hbar: f64,
    transverse_potential: &dyn Fn(f64, f64) -> f64,
    psi: &[Complex64],
) -> Result<Vec<Complex64>> {
    if psi.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "state length {} vs grid {}",
            psi.len(),
            grid.len()
        )));
    }
    let (ds, dss, duu) = spectral_derivs(grid, psi);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.ns {
        let s = grid.s(i);
        let (k, kd) = match chart {
            Some(c) => {
                let (k, kd, _) = c.curve().curvature_derivs(s)?;
                (k, kd)
            }
            None => (0.0, 0.0),
        };
        for j in 0..grid.nu {
            let u = grid.u(j);
            let idx = grid.idx(i, j);
            let w = 1.0 - k * hbar * u;
            if w <= 0.0 {
                return Err(Error::ChartWidth { s, u: hbar * u, jacobian: w });
            }
            let q = match chart {
                Some(c) => c.extrapotential(s, hbar * u)?,
                None => 0.0,
            };
            out[idx] = -0.5 * hbar * hbar / (w * w) * dss[idx]
                - hbar.powi(3) * kd * u / w.powi(3) * ds[idx]
                - hbar * hbar * q * psi[idx]
                - 0.5 * duu[idx]
                + transverse_potential(s, u) * psi[idx];
        }
    }
    Ok(out)
}

/// L2 norm of the local-equation defect zeta = i hbar d/dt psi_ap - H psi_ap
/// at time t. `sample` produces the approximant on the grid at a given time;
/// the time derivative is a central difference with step `delta`, verified
/// by comparing against step delta/2 (Richardson): if the two residuals
/// disagree by more than 30% the step is rejected.
pub fn residual_norm(
    grid: &TubGrid,
    chart: Option<&TubularChart>,
    hbar: f64,
    transverse_potential: &dyn Fn(f64, f64) -> f64,
    sample: &dyn Fn(f64) -> Result<Vec<Complex64>>,
    t: f64,
    delta: f64,
) -> Result<f64> {
    let h_psi = apply_h_bo(grid, chart, hbar, transverse_potential, &sample(t)?)?;
    let zeta = |d: f64| -> Result<Vec<Complex64>> {
        let plus = sample(t + d)?;
        let minus = sample(t - d)?;
        Ok((0..grid.len())
            .map(|i| Complex64::new(0.0, hbar) * (plus[i] - minus[i]) / (2.0 * d) - h_psi[i])
            .collect())
    };
    let full = grid.norm(&zeta(delta)?);
    let half = grid.norm(&zeta(0.5 * delta)?);
    let ratio = (full - half).abs() / half.max(1e-300);
    if ratio > 0.3 {
        return Err(Error::ResidualStep { ratio });
    }
    Ok(half)
}
