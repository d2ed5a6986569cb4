use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::grid::{Grid2D, GridState};
use crate::error::{Error, Result};

/// Density above which a run is rejected: nothing may reach the periodic
/// boundary.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// In-place 2D FFT on x-major data via row transforms and transposes.
pub(crate) struct Fft2 {
    nx: usize,
    ny: usize,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            nx,
            ny,
            fwd_x: planner.plan_fft_forward(nx),
            inv_x: planner.plan_fft_inverse(nx),
            fwd_y: planner.plan_fft_forward(ny),
            inv_y: planner.plan_fft_inverse(ny),
            scratch: vec![Complex64::new(0.0, 0.0); nx * ny],
        }
    }

    fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
        // blocked to keep cache misses bounded on large grids
        const B: usize = 32;
        for i0 in (0..rows).step_by(B) {
            for j0 in (0..cols).step_by(B) {
                for i in i0..(i0 + B).min(rows) {
                    for j in j0..(j0 + B).min(cols) {
                        dst[j * rows + i] = src[i * cols + j];
                    }
                }
            }
        }
    }

    /// data (x-major) -> spectrum (y-major: `ik_y * nx + ik_x`).
    pub fn forward(&mut self, data: &mut Vec<Complex64>) {
        for row in data.chunks_exact_mut(self.ny) {
            self.fwd_y.process(row);
        }
        Self::transpose(data, &mut self.scratch, self.nx, self.ny);
        std::mem::swap(data, &mut self.scratch);
        for row in data.chunks_exact_mut(self.nx) {
            self.fwd_x.process(row);
        }
    }

    /// Inverse of `forward`, including the 1/(nx ny) normalization.
    pub fn inverse(&mut self, data: &mut Vec<Complex64>) {
        for row in data.chunks_exact_mut(self.nx) {
            self.inv_x.process(row);
        }
        Self::transpose(data, &mut self.scratch, self.ny, self.nx);
        std::mem::swap(data, &mut self.scratch);
        for row in data.chunks_exact_mut(self.ny) {
            self.inv_y.process(row);
        }
        let scale = 1.0 / (self.nx * self.ny) as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// Strang-split spectral propagator for i hbar d/dt psi = H psi with
/// H = -(hbar^2/2) Lap + V(x, y); second order in dt, unitary to roundoff.
pub struct Propagator {
    grid: Grid2D,
    hbar: f64,
    dt: f64,
    exp_v_half: Vec<Complex64>,
    /// kinetic phases in the y-major spectral layout
    exp_t: Vec<Complex64>,
    fft: Fft2,
}

impl Propagator {
    pub fn new(grid: Grid2D, potential: &dyn Fn(f64, f64) -> f64, hbar: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !(hbar > 0.0) {
            return Err(Error::Config(format!("need positive dt and hbar, got {dt}, {hbar}")));
        }
        let mut exp_v_half = Vec::with_capacity(grid.len());
        for ix in 0..grid.nx {
            let x = grid.x(ix);
            for iy in 0..grid.ny {
                let v = potential(x, grid.y(iy));
                exp_v_half.push((Complex64::new(0.0, -0.5 * dt / hbar) * v).exp());
            }
        }
        let mut exp_t = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let ky = grid.ky(iy);
            for ix in 0..grid.nx {
                let kx = grid.kx(ix);
                let phase = -0.5 * hbar * dt * (kx * kx + ky * ky);
                exp_t.push(Complex64::new(0.0, phase).exp());
            }
        }
        Ok(Self { grid, hbar, dt, exp_v_half, exp_t, fft: Fft2::new(grid.nx, grid.ny) })
    }

    /// Advances the state, checking the boundary guard as it goes.
    pub fn propagate(&mut self, state: &mut GridState, steps: usize) -> Result<()> {
        if state.grid != self.grid || state.hbar != self.hbar {
            return Err(Error::GridMismatch("state does not match the propagator setup".into()));
        }
        for _ in 0..steps {
            for (z, p) in state.values.iter_mut().zip(&self.exp_v_half) {
                *z *= p;
            }
            self.fft.forward(&mut state.values);
            for (z, p) in state.values.iter_mut().zip(&self.exp_t) {
                *z *= p;
            }
            self.fft.inverse(&mut state.values);
            for (z, p) in state.values.iter_mut().zip(&self.exp_v_half) {
                *z *= p;
            }
            state.time += self.dt;
            let density = state.boundary_density();
            if density > BOUNDARY_GUARD {
                return Err(Error::BoundaryBreach { density });
            }
        }
        Ok(())
    }
}

/// Convenience wrapper: builds a propagator and runs `steps` steps.
pub fn split_step_propagate(
    state: &GridState,
    potential: &dyn Fn(f64, f64) -> f64,
    dt: f64,
    steps: usize,
) -> Result<GridState> {
    let mut out = state.clone();
    let mut prop = Propagator::new(state.grid, potential, state.hbar, dt)?;
    prop.propagate(&mut out, steps)?;
    Ok(out)
}
