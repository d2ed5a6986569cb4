//! Squeezed Gaussian wave packets with matrix-valued dispersion data.
//!
//! A packet family is parameterized by complex n x n matrices (A, B) subject
//! to two compatibility conditions that make every member unit-norm:
//! A^T B - B^T A = 0 and A^dag B + B^dag A = 2 I. The ground member is a
//! Gaussian with covariance (hbar/2) A A^dag; excited members are generated
//! by a raising recurrence indexed by multi-indices in graded lexicographic
//! order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Residual tolerance for the two dispersion-matrix conditions.
pub const CONDITION_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct PacketParams {
    pub hbar: f64,
    /// Position centre a.
    pub centre: DVector<f64>,
    /// Momentum centre eta.
    pub momentum: DVector<f64>,
    pub a_mat: DMatrix<Complex64>,
    pub b_mat: DMatrix<Complex64>,
    /// Excitation multi-index k.
    pub k: Vec<usize>,
    /// Continuously tracked value of det(A)^{-1/2}. When absent the
    /// principal branch is used. Trajectory code keeps this coherent across
    /// time steps so the overall packet phase never jumps.
    pub det_branch: Option<Complex64>,
}

impl PacketParams {
    pub fn new(
        hbar: f64,
        centre: Vec<f64>,
        momentum: Vec<f64>,
        a_mat: DMatrix<Complex64>,
        b_mat: DMatrix<Complex64>,
        k: Vec<usize>,
    ) -> Result<Self> {
        let n = centre.len();
        if momentum.len() != n || a_mat.nrows() != n || b_mat.nrows() != n || k.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "packet data for dimension {n}: momentum {}, A {}x{}, B {}x{}, k {}",
                momentum.len(),
                a_mat.nrows(),
                a_mat.ncols(),
                b_mat.nrows(),
                b_mat.ncols(),
                k.len()
            )));
        }
        if !(hbar > 0.0) {
            return Err(Error::Config(format!("hbar must be positive, got {hbar}")));
        }
        let params = Self {
            hbar,
            centre: DVector::from_vec(centre),
            momentum: DVector::from_vec(momentum),
            a_mat,
            b_mat,
            k,
            det_branch: None,
        };
        let report = validate_params(&params.a_mat, &params.b_mat)?;
        let residual = report.symplectic_residual.max(report.normalization_residual);
        if residual > CONDITION_TOL {
            return Err(Error::InvalidPacket { reason: "matrix conditions violated", residual });
        }
        if report.min_eig_re_ba_inv <= 0.0 {
            return Err(Error::InvalidPacket {
                reason: "Re(B A^{-1}) not positive definite",
                residual: -report.min_eig_re_ba_inv,
            });
        }
        Ok(params)
    }

    pub fn dim(&self) -> usize {
        self.centre.len()
    }

    /// Ground-state position covariance (hbar/2) A A^dag (real by the
    /// matrix conditions).
    pub fn covariance(&self) -> DMatrix<f64> {
        let aa = &self.a_mat * self.a_mat.adjoint();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| 0.5 * self.hbar * aa[(i, j)].re)
    }
}

/// Residuals of the two matrix conditions and the definiteness margin of
/// Re(B A^{-1}).
#[derive(Debug, Clone, Copy)]
pub struct ConditionReport {
    /// max entry of |A^T B - B^T A|
    pub symplectic_residual: f64,
    /// max entry of |A^dag B + B^dag A - 2 I|
    pub normalization_residual: f64,
    /// smallest eigenvalue of the symmetric part of Re(B A^{-1})
    pub min_eig_re_ba_inv: f64,
}

pub fn validate_params(
    a_mat: &DMatrix<Complex64>,
    b_mat: &DMatrix<Complex64>,
) -> Result<ConditionReport> {
    let n = a_mat.nrows();
    if a_mat.ncols() != n || b_mat.nrows() != n || b_mat.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "dispersion matrices must be square and equal size: A {}x{}, B {}x{}",
            a_mat.nrows(),
            a_mat.ncols(),
            b_mat.nrows(),
            b_mat.ncols()
        )));
    }
    let sym = a_mat.transpose() * b_mat - b_mat.transpose() * a_mat;
    let mut norm = a_mat.adjoint() * b_mat + b_mat.adjoint() * a_mat;
    for i in 0..n {
        norm[(i, i)] -= Complex64::new(2.0, 0.0);
    }
    let max_abs = |m: &DMatrix<Complex64>| m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let ba = ba_inv(a_mat, b_mat)?;
    let re_sym = DMatrix::from_fn(n, n, |i, j| 0.5 * (ba[(i, j)].re + ba[(j, i)].re));
    let min_eig = re_sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |m, &x| m.min(x));
    Ok(ConditionReport {
        symplectic_residual: max_abs(&sym),
        normalization_residual: max_abs(&norm),
        min_eig_re_ba_inv: min_eig,
    })
}

fn ba_inv(a_mat: &DMatrix<Complex64>, b_mat: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let inv = a_mat
        .clone()
        .try_inverse()
        .ok_or(Error::SingularDispersion)?;
    Ok(b_mat * inv)
}

/// All multi-indices of length `n` with |k| = degree, lexicographic within
/// the degree (graded lex overall).
pub fn multi_indices(n: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, degree: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        // lex order puts larger leading entries first
        for first in (0..=degree).rev() {
            prefix.push(first);
            rec(n - 1, degree - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n.max(1), degree, &mut Vec::new(), &mut out);
    out
}

/// Evaluates the packet at each point. Points are n-vectors flattened into
/// `points` (row-major, dim() entries per point).
pub fn evaluate_packet(params: &PacketParams, points: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = params.dim();
    let hbar = params.hbar;
    let order: usize = params.k.iter().sum();
    let lu = nalgebra::LU::new(params.a_mat.clone());
    if !lu.is_invertible() {
        return Err(Error::SingularDispersion);
    }
    let det: Complex64 = lu.determinant();
    let prefactor = params
        .det_branch
        .unwrap_or_else(|| (-0.5 * det.ln()).exp())
        * (std::f64::consts::PI * hbar).powf(-(n as f64) / 4.0);
    let ba = ba_inv(&params.a_mat, &params.b_mat)?;
    let a_conj = params.a_mat.map(|z| z.conj());

    // per-level index lookup tables for the raising recurrence
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::with_capacity(order + 1);
    let mut lookup: Vec<HashMap<Vec<usize>, usize>> = Vec::with_capacity(order + 1);
    for deg in 0..=order {
        let idx = multi_indices(n, deg);
        let map = idx.iter().cloned().zip(0..).collect();
        levels.push(idx);
        lookup.push(map);
    }

    let mut out = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "evaluation point has {} entries, packet dimension is {n}",
                p.len()
            )));
        }
        let dx = DVector::from_fn(n, |i, _| p[i] - params.centre[i]);
        let quad: Complex64 = (0..n)
            .map(|i| (0..n).map(|j| ba[(i, j)] * dx[i] * dx[j]).sum::<Complex64>())
            .sum();
        let lin: f64 = (0..n).map(|i| params.momentum[i] * dx[i]).sum();
        let phi0 = prefactor * (-quad / (2.0 * hbar) + Complex64::i() * lin / hbar).exp();
        if order == 0 {
            out.push(phi0);
            continue;
        }
        let mut prev: Vec<Complex64> = Vec::new();
        let mut cur = vec![phi0];
        let dxc = dx.map(|x| Complex64::new((2.0 / hbar).sqrt() * x, 0.0));
        for deg in 0..order {
            let mut next = vec![Complex64::new(0.0, 0.0); levels[deg + 1].len()];
            let mut next_set = vec![false; next.len()];
            for (pos, k) in levels[deg].iter().enumerate() {
                let phi_k = cur[pos];
                let mut rhs = DVector::from_fn(n, |j, _| dxc[j] * phi_k);
                if deg > 0 {
                    let w = DVector::from_fn(n, |j, _| {
                        if k[j] == 0 {
                            Complex64::new(0.0, 0.0)
                        } else {
                            let mut km = k.clone();
                            km[j] -= 1;
                            (k[j] as f64).sqrt() * prev[lookup[deg - 1][&km]]
                        }
                    });
                    rhs -= &a_conj * w;
                }
                let g = lu.solve(&rhs).ok_or(Error::SingularDispersion)?;
                for j in 0..n {
                    let mut kp = k.clone();
                    kp[j] += 1;
                    let pos_up = lookup[deg + 1][&kp];
                    if !next_set[pos_up] {
                        next[pos_up] = g[j] / (k[j] as f64 + 1.0).sqrt();
                        next_set[pos_up] = true;
                    }
                }
            }
            prev = cur;
            cur = next;
        }
        out.push(cur[lookup[order][&params.k]]);
    }
    Ok(out)
}

/// Moments implied by the dispersion data: mean position, mean momentum, and
/// the ground-state position covariance.
#[derive(Debug, Clone)]
pub struct PacketMoments {
    pub position: Vec<f64>,
    pub momentum: Vec<f64>,
    pub covariance: DMatrix<f64>,
}

pub fn packet_moments(params: &PacketParams) -> PacketMoments {
    PacketMoments {
        position: params.centre.iter().copied().collect(),
        momentum: params.momentum.iter().copied().collect(),
        covariance: params.covariance(),
    }
}

/// det(A)^{-1/2} along a sampled matrix path, with the square-root branch
/// continued from the principal value at the first sample. Adjacent samples
/// must be close enough that det(A) rotates by less than pi between them.
pub fn det_sqrt_inv_path(dets: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(dets.len());
    let mut phase = 0.0;
    let mut prev_arg = 0.0;
    for (i, d) in dets.iter().enumerate() {
        let arg = d.arg();
        if i == 0 {
            phase = arg;
        } else {
            let mut delta = arg - prev_arg;
            while delta > std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
            }
            while delta < -std::f64::consts::PI {
                delta += 2.0 * std::f64::consts::PI;
            }
            phase += delta;
        }
        prev_arg = arg;
        let log = Complex64::new(d.norm().ln(), phase);
        out.push((-0.5 * log).exp());
    }
    out
}
