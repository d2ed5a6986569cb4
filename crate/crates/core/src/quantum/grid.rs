use num_complex::Complex64;

use crate::error::{Error, Result};

/// Periodic Cartesian product grid; values are stored x-major
/// (`idx = ix * ny + iy`). Point counts are powers of two so the spectral
/// transforms stay fast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize) -> Result<Self> {
        if !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
            return Err(Error::Config(format!(
                "degenerate grid ranges {x_range:?}, {y_range:?}"
            )));
        }
        if !nx.is_power_of_two() || !ny.is_power_of_two() {
            return Err(Error::Config(format!("grid sizes {nx}x{ny} must be powers of two")));
        }
        Ok(Self { x0: x_range.0, x1: x_range.1, y0: y_range.0, y1: y_range.1, nx, ny })
    }

    pub fn dx(&self) -> f64 {
        (self.x1 - self.x0) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y1 - self.y0) / self.ny as f64
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x0 + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y0 + iy as f64 * self.dy()
    }

    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        ix * self.ny + iy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angular frequency of FFT bin `i` out of `n` over length `l`.
    pub fn frequency(i: usize, n: usize, l: f64) -> f64 {
        let k = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
        2.0 * std::f64::consts::PI * k / l
    }

    pub fn kx(&self, i: usize) -> f64 {
        Self::frequency(i, self.nx, self.x1 - self.x0)
    }

    pub fn ky(&self, i: usize) -> f64 {
        Self::frequency(i, self.ny, self.y1 - self.y0)
    }
}

/// Wave function samples on a [`Grid2D`].
#[derive(Debug, Clone)]
pub struct GridState {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
    pub hbar: f64,
    pub time: f64,
}

impl GridState {
    pub fn zeros(grid: Grid2D, hbar: f64) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()], hbar, time: 0.0 }
    }

    pub fn norm_sqr(&self) -> f64 {
        let cell = self.grid.dx() * self.grid.dy();
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn inner(&self, other: &GridState) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("inner product of states on different grids".into()));
        }
        let cell = self.grid.dx() * self.grid.dy();
        let acc: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(acc * cell)
    }

    /// Rescales to unit norm; returns the constant the state was divided by.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm();
        if n > 0.0 {
            for z in self.values.iter_mut() {
                *z /= n;
            }
        }
        n
    }

    /// Largest |psi|^2 on the outermost ring of grid points.
    pub fn boundary_density(&self) -> f64 {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut peak = 0.0f64;
        for ix in 0..nx {
            peak = peak.max(self.values[self.grid.idx(ix, 0)].norm_sqr());
            peak = peak.max(self.values[self.grid.idx(ix, ny - 1)].norm_sqr());
        }
        for iy in 0..ny {
            peak = peak.max(self.values[self.grid.idx(0, iy)].norm_sqr());
            peak = peak.max(self.values[self.grid.idx(nx - 1, iy)].norm_sqr());
        }
        peak
    }
}
