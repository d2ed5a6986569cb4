//! 2D eigensolver for -(1/2) Laplacian + V(y1, y2) on a Dirichlet square:
//! five-point stencil, deflated inverse power iteration with a geometric
//! multigrid V-cycle as the linear solver. Degenerate partners are recovered
//! by restarting against the converged set.
//!
//! Grids with n = 2^k - 1 (more generally n = 3 mod 4) interior nodes per
//! side coarsen cleanly; other sizes fall back to a larger coarsest solve.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Eigenpair2D {
    pub energy: f64,
    pub index: usize,
    pub half_width: f64,
    /// interior nodes per side; values are row-major, idx = i1 * n + i2
    pub n: usize,
    /// L2-normalized: h^2 * sum v^2 = 1
    pub values: Vec<f64>,
}

const BOUNDARY_DECAY: f64 = 1e-12;

struct Level {
    n: usize,
    h: f64,
    /// V at the interior nodes plus the constant SPD shift
    vpot: Vec<f64>,
}

impl Level {
    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let c = 0.5 / (self.h * self.h);
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let mut acc = (4.0 * c + self.vpot[idx]) * x[idx];
                if i > 0 {
                    acc -= c * x[idx - n];
                }
                if i + 1 < n {
                    acc -= c * x[idx + n];
                }
                if j > 0 {
                    acc -= c * x[idx - 1];
                }
                if j + 1 < n {
                    acc -= c * x[idx + 1];
                }
                out[idx] = acc;
            }
        }
    }

    fn gauss_seidel_color(&self, x: &mut [f64], b: &[f64], color: usize) {
        let n = self.n;
        let c = 0.5 / (self.h * self.h);
        for i in 0..n {
            let j0 = (color + i) % 2;
            let mut j = j0;
            while j < n {
                let idx = i * n + j;
                let mut nb = 0.0;
                if i > 0 {
                    nb += x[idx - n];
                }
                if i + 1 < n {
                    nb += x[idx + n];
                }
                if j > 0 {
                    nb += x[idx - 1];
                }
                if j + 1 < n {
                    nb += x[idx + 1];
                }
                x[idx] = (b[idx] + c * nb) / (4.0 * c + self.vpot[idx]);
                j += 2;
            }
        }
    }

    fn smooth(&self, x: &mut [f64], b: &[f64], sweeps: usize) {
        for _ in 0..sweeps {
            self.gauss_seidel_color(x, b, 0);
            self.gauss_seidel_color(x, b, 1);
        }
    }
}

struct Multigrid {
    levels: Vec<Level>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl Multigrid {
    fn build(potential: &dyn Fn(f64, f64) -> f64, half_width: f64, n: usize, shift: f64) -> Self {
        let mut levels = Vec::new();
        let mut nn = n;
        let mut h = 2.0 * half_width / (n + 1) as f64;
        loop {
            let node = |i: usize| -half_width + (i + 1) as f64 * h;
            let mut v = vec![0.0; nn * nn];
            for i in 0..nn {
                for j in 0..nn {
                    v[i * nn + j] = potential(node(i), node(j)) + shift;
                }
            }
            levels.push(Level { n: nn, h, vpot: v });
            if nn >= 35 && nn % 4 == 3 {
                nn = (nn - 1) / 2;
                h *= 2.0;
            } else {
                break;
            }
        }
        Multigrid { levels }
    }

    /// Full-weighting restriction of a fine residual to the coarse grid.
    fn restrict(&self, l: usize, r: &[f64]) -> Vec<f64> {
        let nf = self.levels[l].n;
        let nc = self.levels[l + 1].n;
        let mut out = vec![0.0; nc * nc];
        let at = |i: isize, j: isize| -> f64 {
            if i < 0 || j < 0 || i >= nf as isize || j >= nf as isize {
                0.0
            } else {
                r[i as usize * nf + j as usize]
            }
        };
        for ci in 0..nc {
            for cj in 0..nc {
                let fi = (2 * ci + 1) as isize;
                let fj = (2 * cj + 1) as isize;
                out[ci * nc + cj] = (4.0 * at(fi, fj)
                    + 2.0 * (at(fi - 1, fj) + at(fi + 1, fj) + at(fi, fj - 1) + at(fi, fj + 1))
                    + at(fi - 1, fj - 1)
                    + at(fi - 1, fj + 1)
                    + at(fi + 1, fj - 1)
                    + at(fi + 1, fj + 1))
                    / 16.0;
            }
        }
        out
    }

    /// Bilinear prolongation, added into the fine-grid vector.
    fn prolong_add(&self, l: usize, e: &[f64], x: &mut [f64]) {
        let nf = self.levels[l].n;
        let nc = self.levels[l + 1].n;
        // 1D weights: fine i odd coincides with coarse (i-1)/2; even i
        // averages its odd neighbors (Dirichlet zero outside)
        let weights = |i: usize| -> [(usize, f64); 2] {
            if i % 2 == 1 {
                [((i - 1) / 2, 1.0), (usize::MAX, 0.0)]
            } else {
                let mut w = [(usize::MAX, 0.0); 2];
                if i > 0 {
                    w[0] = (i / 2 - 1, 0.5);
                }
                if i / 2 < nc {
                    w[1] = (i / 2, 0.5);
                }
                w
            }
        };
        for i in 0..nf {
            for (ci, wi) in weights(i) {
                if ci == usize::MAX || wi == 0.0 {
                    continue;
                }
                for j in 0..nf {
                    let mut acc = 0.0;
                    for (cj, wj) in weights(j) {
                        if cj != usize::MAX && wj != 0.0 {
                            acc += wi * wj * e[ci * nc + cj];
                        }
                    }
                    x[i * nf + j] += acc;
                }
            }
        }
    }

    fn coarsest_solve(&self, b: &[f64], x: &mut [f64]) {
        // conjugate gradients; the coarsest operator is tiny and well scaled
        let level = self.levels.last().unwrap();
        let dim = level.n * level.n;
        let mut r = b.to_vec();
        let mut ap = vec![0.0; dim];
        level.apply(x, &mut ap);
        axpy(&mut r, -1.0, &ap);
        let mut p = r.clone();
        let b2 = dot(b, b).max(1e-300);
        let mut rr = dot(&r, &r);
        for _ in 0..2000 {
            if rr <= 1e-26 * b2 {
                break;
            }
            level.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            axpy(x, alpha, &p);
            axpy(&mut r, -alpha, &ap);
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
        }
    }

    fn vcycle(&self, l: usize, x: &mut [f64], b: &[f64]) {
        if l + 1 == self.levels.len() {
            self.coarsest_solve(b, x);
            return;
        }
        let level = &self.levels[l];
        level.smooth(x, b, 2);
        let mut r = vec![0.0; x.len()];
        level.apply(x, &mut r);
        for (ri, bi) in r.iter_mut().zip(b) {
            *ri = bi - *ri;
        }
        let rc = self.restrict(l, &r);
        let mut e = vec![0.0; rc.len()];
        self.vcycle(l + 1, &mut e, &rc);
        self.prolong_add(l, &e, x);
        level.smooth(x, b, 2);
    }

    /// Solve A x = b to relative residual `tol`; x holds the warm start.
    fn solve(&self, b: &[f64], x: &mut [f64], tol: f64) -> Result<()> {
        let level = &self.levels[0];
        let b2 = dot(b, b).sqrt().max(1e-300);
        let mut r = vec![0.0; b.len()];
        for _ in 0..60 {
            self.vcycle(0, x, b);
            level.apply(x, &mut r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            if dot(&r, &r).sqrt() <= tol * b2 {
                return Ok(());
            }
        }
        Err(Error::Eigensolver("multigrid solver stalled".into()))
    }
}

/// Lowest `count` eigenpairs of -(1/2) Lap + V on the square
/// (-half_width, half_width)^2 with n interior nodes per side.
pub fn fd_eigensolve_2d(
    potential: &dyn Fn(f64, f64) -> f64,
    half_width: f64,
    n: usize,
    count: usize,
) -> Result<Vec<Eigenpair2D>> {
    if n < 16 || count == 0 {
        return Err(Error::Config("fd_eigensolve_2d: bad grid or count".into()));
    }
    // keep the operator SPD even if V dips below zero
    let h = 2.0 * half_width / (n + 1) as f64;
    let node = |i: usize| -half_width + (i + 1) as f64 * h;
    let mut vmin = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            vmin = vmin.min(potential(node(i), node(j)));
        }
    }
    let shift = if vmin < 0.5 { 0.5 - vmin } else { 0.0 };
    let mg = Multigrid::build(potential, half_width, n, shift);
    let dim = n * n;
    let mut seed = 0x243f6a8885a308d3u64;
    let mut rand = move || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut scratch = vec![0.0; dim];
    while found.len() < count {
        // Lanczos on A^{-1} (multigrid solves), deflated against the
        // converged set; the largest Ritz value is the next-lowest eigenvalue
        let deflate: Vec<&Vec<f64>> = found.iter().map(|(_, v)| v).collect();
        let mut q0: Vec<f64> = (0..dim).map(|_| rand()).collect();
        for d in &deflate {
            let c = dot(&q0, d);
            axpy(&mut q0, -c, d);
        }
        let nrm = dot(&q0, &q0).sqrt();
        for x in q0.iter_mut() {
            *x /= nrm;
        }
        let mut basis = vec![q0];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut ritz: Vec<f64> = Vec::new();
        let max_steps = 40;
        for j in 0..max_steps {
            let mut w = vec![0.0; dim];
            mg.solve(&basis[j], &mut w, 1e-10)?;
            let alpha = dot(&w, &basis[j]);
            alphas.push(alpha);
            axpy(&mut w, -alpha, &basis[j]);
            if j > 0 {
                let qprev = basis[j - 1].clone();
                axpy(&mut w, -betas[j - 1], &qprev);
            }
            for v in basis.iter().map(|b| b as &Vec<f64>).chain(deflate.iter().copied()) {
                let c = dot(&w, v);
                axpy(&mut w, -c, v);
            }
            let beta = dot(&w, &w).sqrt();
            let neg: Vec<f64> = alphas.iter().map(|a| -a).collect();
            let mu = -crate::numerics::tridiag_lowest_eigenvalues(&neg, &betas, 1)[0];
            ritz = crate::numerics::tridiag_eigenvector(&alphas, &betas, mu)?;
            // standard Lanczos residual bound for the top Ritz pair
            let est = beta * ritz[j].abs();
            if beta < 1e-12 || est < 1e-8 * mu || j + 1 == max_steps {
                break;
            }
            betas.push(beta);
            for x in w.iter_mut() {
                *x /= beta;
            }
            basis.push(w);
        }
        let mut v = vec![0.0; dim];
        for (c, q) in ritz.iter().zip(&basis) {
            axpy(&mut v, *c, q);
        }
        let mut rho = 0.0;
        let mut res = f64::INFINITY;
        // inverse-power polish: damps the high-mode noise Lanczos leaves in
        // the Ritz vector (it would otherwise pollute the boundary tail)
        for polish in 0..4 {
            for d in &deflate {
                let c = dot(&v, d);
                axpy(&mut v, -c, d);
            }
            let nrm = dot(&v, &v).sqrt();
            for x in v.iter_mut() {
                *x /= nrm;
            }
            mg.levels[0].apply(&v, &mut scratch);
            rho = dot(&v, &scratch);
            axpy(&mut scratch, -rho, &v);
            res = dot(&scratch, &scratch).sqrt();
            if res < 1e-9 * (1.0 + rho.abs()) || polish == 3 {
                break;
            }
            let b = v.clone();
            for x in v.iter_mut() {
                *x /= rho;
            }
            mg.solve(&b, &mut v, 1e-10)?;
        }
        if res > 1e-4 * (1.0 + rho.abs()) {
            return Err(Error::Eigensolver(format!(
                "Lanczos residual {res:.3e} near eigenvalue {:.6}",
                rho - shift
            )));
        }
        found.push((rho, v));
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(count);
    for (index, (rho, mut v)) in found.into_iter().enumerate() {
        let energy = rho - shift;
        let max = v.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let mut boundary = 0.0f64;
        for i in 0..n {
            for &idx in &[i, (n - 1) * n + i, i * n, i * n + n - 1] {
                boundary = boundary.max(v[idx].abs());
            }
        }
        if boundary > BOUNDARY_DECAY * max {
            return Err(Error::IntervalTooSmall { amplitude: boundary / max });
        }
        let lead = v.iter().find(|x| x.abs() > 1e-8 * max).copied().unwrap_or(1.0);
        let scale = if lead < 0.0 { -1.0 } else { 1.0 } / h;
        for x in v.iter_mut() {
            *x *= scale;
        }
        out.push(Eigenpair2D { energy, index, half_width, n, values: v });
    }
    Ok(out)
}
