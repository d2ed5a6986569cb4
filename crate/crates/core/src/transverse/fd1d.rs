//! 1D eigensolver for -(1/2) d^2/du^2 + V(u) on a symmetric interval with
//! Dirichlet boundaries: second-order central differences, Sturm bisection
//! for the eigenvalues, inverse iteration for the eigenvectors.

use crate::error::{Error, Result};
use crate::numerics::{tridiag_eigenvector, tridiag_lowest_eigenvalues};

/// Uniform interior grid on (-half_width, half_width) with n interior nodes.
#[derive(Clone, Copy, Debug)]
pub struct Grid1D {
    pub half_width: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.n + 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.h();
        (1..=self.n).map(|i| -self.half_width + i as f64 * h).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair1D {
    pub energy: f64,
    pub index: usize,
    pub grid: Grid1D,
    /// values at the interior nodes, L2-normalized: h * sum v^2 = 1
    pub values: Vec<f64>,
}

const BOUNDARY_DECAY: f64 = 1e-12;

/// Lowest `count` Dirichlet eigenpairs on the given grid. Fails with an
/// interval-too-small error if any eigenfunction has not decayed below
/// 1e-12 (relative amplitude) at the outermost nodes.
pub fn fd_eigensolve_1d(
    potential: &dyn Fn(f64) -> f64,
    grid: Grid1D,
    count: usize,
) -> Result<Vec<Eigenpair1D>> {
    if grid.n < 8 || count == 0 || count > grid.n / 4 {
        return Err(Error::Config("fd_eigensolve_1d: bad grid or count".into()));
    }
    let h = grid.h();
    let us = grid.nodes();
    let diag: Vec<f64> = us.iter().map(|&u| 1.0 / (h * h) + potential(u)).collect();
    let off = vec![-0.5 / (h * h); grid.n - 1];
    let lambdas = tridiag_lowest_eigenvalues(&diag, &off, count);
    let mut out = Vec::with_capacity(count);
    for (index, &energy) in lambdas.iter().enumerate() {
        let mut v = tridiag_eigenvector(&diag, &off, energy)?;
        let norm = (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let max = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let boundary = v[0].abs().max(v[grid.n - 1].abs());
        if boundary > BOUNDARY_DECAY * max {
            return Err(Error::IntervalTooSmall { amplitude: boundary / max });
        }
        // sign convention: first sample of visible magnitude is positive
        let lead = v.iter().find(|x| x.abs() > 1e-8 * max).copied().unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for x in v.iter_mut() {
            *x *= sign / norm;
        }
        out.push(Eigenpair1D { energy, index, grid, values: v });
    }
    Ok(out)
}

/// Auto-widening wrapper: grows the interval (keeping the spacing roughly
/// `dx`) until the boundary-decay check passes.
pub fn fd_eigensolve_1d_auto(
    potential: &dyn Fn(f64) -> f64,
    count: usize,
    initial_half_width: f64,
    dx: f64,
) -> Result<Vec<Eigenpair1D>> {
    let mut hw = initial_half_width;
    for _ in 0..8 {
        let n = ((2.0 * hw / dx).ceil() as usize).max(64);
        let grid = Grid1D { half_width: hw, n };
        match fd_eigensolve_1d(potential, grid, count) {
            Err(Error::IntervalTooSmall { .. }) => hw *= 1.5,
            other => return other,
        }
    }
    Err(Error::IntervalTooSmall { amplitude: f64::NAN })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn harmonic_levels() {
        let pairs = fd_eigensolve_1d(
            &|u| 0.5 * u * u,
            Grid1D { half_width: 10.0, n: 32_000 },
            6,
        );
        let pairs = pairs.unwrap();
        for (n, p) in pairs.iter().enumerate() {
            assert_abs_diff_eq!(p.energy, n as f64 + 0.5, epsilon = 1e-6);
        }
    }

    #[test]
    fn quartic_ground_matches_shooting_oracle() {
        // independent oracle: bisection on E with RK4 shooting from the left,
        // matching the node count of the ground state (no sign change)
        let pot = |u: f64| u.powi(4);
        let pairs =
            fd_eigensolve_1d_auto(&pot, 1, 4.0, 0.002).unwrap();
        let shoot = |e: f64| -> f64 {
            // integrate psi'' = 2(V - E) psi from u = -L with decaying start
            let l = 5.0;
            let n = 20_000;
            let h = 2.0 * l / n as f64;
            let mut y = [1e-200, 1e-200 * (2.0 * (pot(-l) - e)).sqrt()];
            let f = |u: f64, y: [f64; 2]| [y[1], 2.0 * (pot(u) - e) * y[0]];
            let mut u = -l;
            for _ in 0..n {
                let k1 = f(u, y);
                let k2 = f(u + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
                let k3 = f(u + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
                let k4 = f(u + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
                y[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
                y[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
                // renormalize to avoid overflow
                let m = y[0].abs().max(y[1].abs());
                if m > 1e100 {
                    y[0] /= m;
                    y[1] /= m;
                }
                u += h;
            }
            y[0]
        };
        // ground state energy bracketed where the shot flips sign
        let (mut lo, mut hi) = (0.3, 0.9);
        assert!(shoot(lo) * shoot(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if shoot(lo) * shoot(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert_abs_diff_eq!(pairs[0].energy, oracle, epsilon = 1e-6);
    }

    #[test]
    fn parity_alternates_for_symmetric_potential() {
        let pairs = fd_eigensolve_1d(
            &|u| 0.5 * u * u + 0.1 * u.powi(4),
            Grid1D { half_width: 8.0, n: 2000 },
            4,
        )
        .unwrap();
        for (n, p) in pairs.iter().enumerate() {
            let m = p.values.len();
            let mut err = 0.0f64;
            for i in 0..m {
                let expected = if n % 2 == 0 { p.values[m - 1 - i] } else { -p.values[m - 1 - i] };
                err = err.max((p.values[i] - expected).abs());
            }
            assert!(err < 1e-6, "parity violation {err} at level {n}");
        }
    }

    #[test]
    fn interval_too_small_detected() {
        let r = fd_eigensolve_1d(&|u| 0.5 * u * u, Grid1D { half_width: 2.0, n: 200 }, 1);
        assert!(matches!(r, Err(Error::IntervalTooSmall { .. })));
    }

    #[test]
    fn second_order_convergence() {
        let exact = 0.5;
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [250usize, 500, 1000, 2000] {
            let grid = Grid1D { half_width: 10.0, n };
            let p = fd_eigensolve_1d(&|u| 0.5 * u * u, grid, 1).unwrap();
            errs.push((p[0].energy - exact).abs());
            hs.push(grid.h());
        }
        let (slope, _, _) = crate::numerics::fit_loglog(&hs, &errs);
        assert!(slope >= 1.9, "observed order {slope}");
    }
}
