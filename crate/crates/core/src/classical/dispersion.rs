use nalgebra::DMatrix;
use num_complex::Complex64;

use super::integrate::{rk4_step, ClassicalTrajectory};
use super::potential::{Metric, Potential};
use crate::error::{Error, Result};
use crate::packets::validate_params;

/// Two readings of the dispersion-matrix ODE system. They differ in whether
/// the effective-potential Hessian term in B-dot carries a factor i: with it
/// (FlatConsistent) the identity-metric system reduces to A-dot = i B,
/// B-dot = i Hess(E) A, which preserves the packet matrix conditions;
/// without it (PaperLiteral) the system is integrated exactly as printed in
/// the source it was taken from. The discrepancy is reported, not resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionConvention {
    FlatConsistent,
    PaperLiteral,
}

const FD_H: f64 = 1e-4;

/// d(G^{-1})/d a_j at `a`, 4th-order central.
fn dinv_metric(metric: &dyn Metric, a: &[f64], j: usize) -> Result<DMatrix<f64>> {
    let h = FD_H * (1.0 + a[j].abs());
    let mut p = a.to_vec();
    let mut at = |x: f64| -> Result<DMatrix<f64>> {
        p[j] = x;
        let m = metric.inverse_metric(&p).ok_or(Error::DegenerateMetric { time: f64::NAN })?;
        p[j] = a[j];
        Ok(m)
    };
    Ok((at(a[j] - 2.0 * h)? - at(a[j] - h)? * 8.0 + at(a[j] + h)? * 8.0 - at(a[j] + 2.0 * h)?)
        / (12.0 * h))
}

/// d^2(G^{-1})/(d a_i d a_j), 2nd-order central (diagonal and polarized
/// mixed stencils).
fn d2inv_metric(metric: &dyn Metric, a: &[f64], i: usize, j: usize) -> Result<DMatrix<f64>> {
    let hi = FD_H * (1.0 + a[i].abs());
    let hj = FD_H * (1.0 + a[j].abs());
    let mut p = a.to_vec();
    let mut at = |xi: f64, xj: f64| -> Result<DMatrix<f64>> {
        p[i] = xi;
        p[j] = xj;
        let m = metric.inverse_metric(&p).ok_or(Error::DegenerateMetric { time: f64::NAN })?;
        p[i] = a[i];
        p[j] = a[j];
        Ok(m)
    };
    if i == j {
        let centre = metric
            .inverse_metric(a)
            .ok_or(Error::DegenerateMetric { time: f64::NAN })?;
        Ok((at(a[i] - hi, a[j] - hi)? + at(a[i] + hi, a[j] + hi)? - centre * 2.0) / (hi * hi))
    } else {
        Ok((at(a[i] + hi, a[j] + hj)? - at(a[i] + hi, a[j] - hj)? - at(a[i] - hi, a[j] + hj)?
            + at(a[i] - hi, a[j] - hj)?)
            / (4.0 * hi * hj))
    }
}

struct Coefficients {
    /// C with A-dot = C A + i G^{-1} B
    c_mat: DMatrix<f64>,
    /// D with the metric-curvature B-dot term (i/2) D A
    d_mat: DMatrix<f64>,
    /// effective-potential Hessian
    hess: DMatrix<f64>,
    /// F with the B-dot transport term -F B
    f_mat: DMatrix<f64>,
    inv: DMatrix<f64>,
}

fn coefficients(
    metric: &dyn Metric,
    potential: &dyn Potential,
    a: &[f64],
    eta: &[f64],
) -> Result<Coefficients> {
    let n = potential.dim();
    let hess = potential.hessian(a);
    if metric.is_flat() {
        return Ok(Coefficients {
            c_mat: DMatrix::zeros(n, n),
            d_mat: DMatrix::zeros(n, n),
            hess,
            f_mat: DMatrix::zeros(n, n),
            inv: DMatrix::identity(n, n),
        });
    }
    let g = metric.metric(a);
    let inv = metric.inverse_metric(a).ok_or(Error::DegenerateMetric { time: f64::NAN })?;
    let dinv: Vec<DMatrix<f64>> =
        (0..n).map(|j| dinv_metric(metric, a, j)).collect::<Result<_>>()?;
    // t[j] = G d_j(G^{-1})
    let t: Vec<DMatrix<f64>> = dinv.iter().map(|d| &g * d).collect();
    let mut c_mat = DMatrix::zeros(n, n);
    let mut f_mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut c = 0.0;
            let mut f = 0.0;
            for k in 0..n {
                c += eta[k] * t[j][(k, i)];
                f += eta[k] * t[i][(k, j)];
            }
            c_mat[(i, j)] = c;
            f_mat[(i, j)] = f;
        }
    }
    let mut d_mat = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let m = &g * d2inv_metric(metric, a, i, j)? * &g;
            let mut acc = 0.0;
            for p in 0..n {
                for q in 0..n {
                    acc += eta[p] * m[(p, q)] * eta[q];
                }
            }
            d_mat[(i, j)] = acc;
        }
    }
    Ok(Coefficients { c_mat, d_mat, hess, f_mat, inv })
}

fn pack(y: &mut Vec<f64>, m: &DMatrix<Complex64>) {
    for z in m.iter() {
        y.push(z.re);
        y.push(z.im);
    }
}

fn unpack(n: usize, y: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        // column-major to match nalgebra's iter()
        let idx = 2 * (j * n + i);
        Complex64::new(y[idx], y[idx + 1])
    })
}

/// Re-integrates the trajectory's (a, eta) together with the dispersion
/// matrices in the same RK4 stages; returns a copy of the trajectory with
/// A(t), B(t) attached.
pub fn evolve_dispersion(
    metric: &dyn Metric,
    potential: &dyn Potential,
    trajectory: &ClassicalTrajectory,
    a0_mat: &DMatrix<Complex64>,
    b0_mat: &DMatrix<Complex64>,
    convention: DispersionConvention,
) -> Result<ClassicalTrajectory> {
    let n = potential.dim();
    if trajectory.len() < 2 {
        return Err(Error::Config("trajectory must have at least two samples".into()));
    }
    let report = validate_params(a0_mat, b0_mat)?;
    let residual = report.symplectic_residual.max(report.normalization_residual);
    if residual > crate::packets::CONDITION_TOL {
        return Err(Error::InvalidPacket { reason: "initial matrix conditions violated", residual });
    }
    let dt = trajectory.dt();
    let hess_factor = match convention {
        DispersionConvention::FlatConsistent => Complex64::i(),
        DispersionConvention::PaperLiteral => Complex64::new(1.0, 0.0),
    };
    let mut rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (a, eta) = (&y[..n], &y[n..2 * n]);
        let co = coefficients(metric, potential, a, eta)?;
        let a_mat = unpack(n, &y[2 * n..2 * n + 2 * n * n]);
        let b_mat = unpack(n, &y[2 * n + 2 * n * n..]);
        let mut dy = Vec::with_capacity(y.len());
        dy.extend_from_slice(eta);
        let grad = potential.gradient(a);
        let gamma = metric.christoffel(a).ok_or(Error::DegenerateMetric { time: f64::NAN })?;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc -= gamma[i][(j, k)] * eta[j] * eta[k];
                }
                acc -= co.inv[(i, j)] * grad[j];
            }
            dy.push(acc);
        }
        let c_c = co.c_mat.map(|x| Complex64::new(x, 0.0));
        let inv_c = co.inv.map(|x| Complex64::new(x, 0.0));
        let da = &c_c * &a_mat + (&inv_c * &b_mat).map(|z| Complex64::i() * z);
        let d_c = co.d_mat.map(|x| Complex64::new(0.5, 0.0) * Complex64::i() * x);
        let h_c = co.hess.map(|x| hess_factor * x);
        let f_c = co.f_mat.map(|x| Complex64::new(x, 0.0));
        let db = (&d_c + &h_c) * &a_mat - &f_c * &b_mat;
        pack(&mut dy, &da);
        pack(&mut dy, &db);
        Ok(dy)
    };
    let mut y: Vec<f64> = Vec::with_capacity(2 * n + 4 * n * n);
    y.extend_from_slice(&trajectory.position[0]);
    y.extend_from_slice(&trajectory.momentum[0]);
    pack(&mut y, a0_mat);
    pack(&mut y, b0_mat);
    let mut a_out = Vec::with_capacity(trajectory.len());
    let mut b_out = Vec::with_capacity(trajectory.len());
    let check = convention == DispersionConvention::FlatConsistent && metric.is_flat();
    for s in 0..trajectory.len() {
        let a_mat = unpack(n, &y[2 * n..2 * n + 2 * n * n]);
        let b_mat = unpack(n, &y[2 * n + 2 * n * n..]);
        if check {
            let rep = validate_params(&a_mat, &b_mat)?;
            let res = rep.symplectic_residual.max(rep.normalization_residual);
            if res > 1e-6 {
                return Err(Error::IntegratorTolerance { residual: res });
            }
        }
        a_out.push(a_mat);
        b_out.push(b_mat);
        if s + 1 < trajectory.len() {
            y = rk4_step(&mut rhs, trajectory.times[s], &y, dt)?;
        }
    }
    let mut out = trajectory.clone();
    out.a_mat = Some(a_out);
    out.b_mat = Some(b_out);
    Ok(out)
}
