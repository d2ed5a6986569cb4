//! Executable checks that a confining potential W actually confines to the
//! declared constraint set: W and its gradient vanish on the samples, the
//! Hessian restricted to the normal directions is uniformly positive, and the
//! normal-Hessian eigenprojections vary continuously along the sample chain.

use crate::numerics::{deriv1, deriv2};
use nalgebra::{DMatrix, SymmetricEigen};

/// One sampled point of the constraint manifold with its normal frame.
#[derive(Clone, Debug)]
pub struct ConstraintSample {
    pub point: Vec<f64>,
    /// orthonormal normal vectors at the point (codim many)
    pub normals: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ConstraintReport {
    pub zero_set_ok: bool,
    pub gradient_ok: bool,
    /// smallest normal-Hessian eigenvalue at each sample
    pub hessian_min_eigenvalue: Vec<f64>,
    pub nondegenerate_ok: bool,
    pub spectrally_smooth: bool,
    /// indices i where the ground projector jumps between samples i and i+1
    pub discontinuity_locations: Vec<usize>,
}

impl ConstraintReport {
    pub fn all_ok(&self) -> bool {
        self.zero_set_ok && self.gradient_ok && self.nondegenerate_ok && self.spectrally_smooth
    }
}

const ZERO_TOL: f64 = 1e-8;
const GRAD_TOL: f64 = 1e-6;
const NONDEGENERATE_TOL: f64 = 1e-8;
/// Frobenius-norm jump of the ground projector that flags a discontinuity.
const PROJECTOR_JUMP: f64 = 0.5;
const FD_H: f64 = 1e-4;

fn along<'a>(w: &'a dyn Fn(&[f64]) -> f64, p: &[f64], v: &[f64]) -> impl Fn(f64) -> f64 + 'a {
    let p = p.to_vec();
    let v = v.to_vec();
    move |t: f64| {
        let y: Vec<f64> = p.iter().zip(&v).map(|(a, b)| a + t * b).collect();
        w(&y)
    }
}

/// Hessian of W restricted to span(normals): H_kh = n_k^T (D^2 W) n_h,
/// via directional second differences.
fn normal_hessian(w: &dyn Fn(&[f64]) -> f64, sample: &ConstraintSample) -> DMatrix<f64> {
    let m = sample.normals.len();
    DMatrix::from_fn(m, m, |k, h| {
        if k == h {
            deriv2(&along(w, &sample.point, &sample.normals[k]), 0.0, FD_H)
        } else {
            // polarization: d^2 along (n_k + n_h) minus the diagonals, halved
            let sum: Vec<f64> = sample.normals[k]
                .iter()
                .zip(&sample.normals[h])
                .map(|(a, b)| a + b)
                .collect();
            let dkk = deriv2(&along(w, &sample.point, &sample.normals[k]), 0.0, FD_H);
            let dhh = deriv2(&along(w, &sample.point, &sample.normals[h]), 0.0, FD_H);
            let dss = deriv2(&along(w, &sample.point, &sum), 0.0, FD_H);
            0.5 * (dss - dkk - dhh)
        }
    })
}

/// Sorted eigen-decomposition of a small symmetric matrix.
fn sorted_eigen(h: DMatrix<f64>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let eig = SymmetricEigen::new(h);
    let m = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().cloned().collect())
        .collect();
    (vals, vecs)
}

fn is_simple(vals: &[f64], k: usize) -> bool {
    let tol = 1e-6 * (1.0 + vals[k].abs());
    (k == 0 || vals[k] - vals[k - 1] > tol)
        && (k + 1 == vals.len() || vals[k + 1] - vals[k] > tol)
}

pub fn validate_constraint(
    w: &dyn Fn(&[f64]) -> f64,
    samples: &[ConstraintSample],
) -> ConstraintReport {
    let mut zero_set_ok = true;
    let mut gradient_ok = true;
    let mut hessian_min = Vec::with_capacity(samples.len());
    let mut spectra = Vec::with_capacity(samples.len());
    for sample in samples {
        if w(&sample.point).abs() > ZERO_TOL {
            zero_set_ok = false;
        }
        for d in 0..sample.point.len() {
            let mut e = vec![0.0; sample.point.len()];
            e[d] = 1.0;
            if deriv1(&along(w, &sample.point, &e), 0.0, FD_H).abs() > GRAD_TOL {
                gradient_ok = false;
            }
        }
        let (vals, vecs) = sorted_eigen(normal_hessian(w, sample));
        hessian_min.push(vals[0]);
        spectra.push((vals, vecs));
    }

    // Spectral smoothness: an eigenprojector of a smooth Hessian family is
    // continuous away from crossings, so a pointwise projector comparison
    // cannot see the half-angle twist of an eigenvalue-crossing loop. We
    // therefore transport eigenvector signs continuously along the chain and
    // test holonomy: a sign-aligned jump mid-chain is a genuine crossing, and
    // a residual flip when a closed chain returns to its start means no
    // smooth global spectral decomposition exists (discontinuity reported at
    // the closing segment).
    let mut discontinuities = Vec::new();
    let n = samples.len();
    if n >= 2 {
        let m = spectra[0].0.len();
        let closed = {
            let d2: f64 = samples[0]
                .point
                .iter()
                .zip(&samples[n - 1].point)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d2.sqrt() < 1e-9
        };
        for k in 0..m {
            if !spectra.iter().all(|(vals, _)| is_simple(vals, k)) {
                continue;
            }
            let mut aligned: Vec<Vec<f64>> = vec![spectra[0].1[k].clone()];
            for i in 1..n {
                let prev = aligned.last().unwrap().clone();
                let mut v = spectra[i].1[k].clone();
                let d: f64 = prev.iter().zip(&v).map(|(a, b)| a * b).sum();
                if d < 0.0 {
                    for c in v.iter_mut() {
                        *c = -*c;
                    }
                }
                let dist: f64 = prev
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if dist > PROJECTOR_JUMP && !discontinuities.contains(&(i - 1)) {
                    discontinuities.push(i - 1);
                }
                aligned.push(v);
            }
            if closed {
                let dist: f64 = aligned[0]
                    .iter()
                    .zip(&aligned[n - 1])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if dist > PROJECTOR_JUMP && !discontinuities.contains(&(n - 1)) {
                    discontinuities.push(n - 1);
                }
            }
        }
        // Degenerate clusters are compared through their (sign-free)
        // projectors; a jump there is an actual crossing of the cluster.
        for i in 0..n - 1 {
            let p_of = |idx: usize| -> DMatrix<f64> {
                let (vals, vecs) = &spectra[idx];
                let mut p = DMatrix::zeros(m, m);
                for k in 0..m {
                    if !is_simple(vals, k) {
                        let v = DMatrix::from_column_slice(m, 1, &vecs[k]);
                        p += &v * v.transpose();
                    }
                }
                p
            };
            if (p_of(i + 1) - p_of(i)).norm() > PROJECTOR_JUMP && !discontinuities.contains(&i) {
                discontinuities.push(i);
            }
        }
        discontinuities.sort_unstable();
    }
    let nondegenerate_ok = hessian_min.iter().all(|&e| e > NONDEGENERATE_TOL);
    ConstraintReport {
        zero_set_ok,
        gradient_ok,
        nondegenerate_ok,
        hessian_min_eigenvalue: hessian_min,
        spectrally_smooth: discontinuities.is_empty(),
        discontinuity_locations: discontinuities,
    }
}
