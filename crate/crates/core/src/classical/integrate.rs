use nalgebra::DMatrix;
use num_complex::Complex64;

use super::potential::{Metric, Potential};
use crate::error::{Error, Result};

/// Sampled solution of the constrained classical equations. Dispersion
/// matrices are filled in by `evolve_dispersion`.
#[derive(Debug, Clone)]
pub struct ClassicalTrajectory {
    pub times: Vec<f64>,
    /// centre a(t)
    pub position: Vec<Vec<f64>>,
    /// momentum eta(t)
    pub momentum: Vec<Vec<f64>>,
    /// action S(t)
    pub action: Vec<f64>,
    pub energy: Vec<f64>,
    pub a_mat: Option<Vec<DMatrix<Complex64>>>,
    pub b_mat: Option<Vec<DMatrix<Complex64>>>,
}

impl ClassicalTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.times.len() < 2 { 0.0 } else { self.times[1] - self.times[0] }
    }

    /// `t,a...,eta...,S,energy[,A_re...,A_im...,B_re...,B_im...]` rows,
    /// flattened row-major.
    pub fn csv(&self) -> String {
        let n = self.position.first().map_or(0, |a| a.len());
        let mut head = String::from("t");
        for i in 0..n {
            head.push_str(&format!(",a{i}"));
        }
        for i in 0..n {
            head.push_str(&format!(",eta{i}"));
        }
        head.push_str(",S,energy");
        if self.a_mat.is_some() {
            for tag in ["A_re", "A_im", "B_re", "B_im"] {
                for i in 0..n {
                    for j in 0..n {
                        head.push_str(&format!(",{tag}{i}{j}"));
                    }
                }
            }
        }
        head.push('\n');
        let mut out = head;
        for s in 0..self.len() {
            out.push_str(&format!("{:.16e}", self.times[s]));
            for x in &self.position[s] {
                out.push_str(&format!(",{x:.16e}"));
            }
            for x in &self.momentum[s] {
                out.push_str(&format!(",{x:.16e}"));
            }
            out.push_str(&format!(",{:.16e},{:.16e}", self.action[s], self.energy[s]));
            if let (Some(am), Some(bm)) = (&self.a_mat, &self.b_mat) {
                for m in [&am[s], &bm[s]] {
                    for part in 0..2 {
                        for i in 0..n {
                            for j in 0..n {
                                let z = m[(i, j)];
                                let x = if part == 0 { z.re } else { z.im };
                                out.push_str(&format!(",{x:.16e}"));
                            }
                        }
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

/// One RK4 step of y' = f(t, y) for flat state vectors.
pub(crate) fn rk4_step(
    f: &mut dyn FnMut(f64, &[f64]) -> Result<Vec<f64>>,
    t: f64,
    y: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let k1 = f(t, y)?;
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * dt * k).collect();
    let k2 = f(t + 0.5 * dt, &y2)?;
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * dt * k).collect();
    let k3 = f(t + 0.5 * dt, &y3)?;
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + dt * k).collect();
    let k4 = f(t + dt, &y4)?;
    Ok((0..y.len())
        .map(|i| y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn steps_for(total: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !(total > 0.0) {
        return Err(Error::Config(format!("need positive horizon and step, got T={total}, dt={dt}")));
    }
    Ok((total / dt).round().max(1.0) as usize)
}

/// Integrates a-dot = eta, eta-dot = -grad E, with the action
/// S = int (|eta|^2/2 - E) accumulated in the same stages.
pub fn integrate_flat(
    potential: &dyn Potential,
    a0: &[f64],
    eta0: &[f64],
    total_time: f64,
    dt: f64,
) -> Result<ClassicalTrajectory> {
    let n = potential.dim();
    if a0.len() != n || eta0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "initial data dimension {} / {} vs potential dimension {n}",
            a0.len(),
            eta0.len()
        )));
    }
    let steps = steps_for(total_time, dt)?;
    // state = [a, eta, S]
    let mut rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (a, eta) = (&y[..n], &y[n..2 * n]);
        let g = potential.gradient(a);
        let mut dy = Vec::with_capacity(2 * n + 1);
        dy.extend_from_slice(eta);
        dy.extend(g.iter().map(|x| -x));
        let kin: f64 = eta.iter().map(|x| 0.5 * x * x).sum();
        dy.push(kin - potential.value(a));
        Ok(dy)
    };
    let mut y: Vec<f64> = a0.iter().chain(eta0).copied().chain([0.0]).collect();
    let mut traj = ClassicalTrajectory {
        times: Vec::with_capacity(steps + 1),
        position: Vec::with_capacity(steps + 1),
        momentum: Vec::with_capacity(steps + 1),
        action: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        a_mat: None,
        b_mat: None,
    };
    for s in 0..=steps {
        let t = s as f64 * dt;
        let (a, eta) = (y[..n].to_vec(), y[n..2 * n].to_vec());
        if !potential.contains(&a) {
            return Err(Error::DomainExit { time: t });
        }
        let kin: f64 = eta.iter().map(|x| 0.5 * x * x).sum();
        traj.energy.push(kin + potential.value(&a));
        traj.times.push(t);
        traj.position.push(a);
        traj.momentum.push(eta);
        traj.action.push(y[2 * n]);
        if s < steps {
            y = rk4_step(&mut rhs, t, &y, dt)?;
        }
    }
    Ok(traj)
}

/// Integrates a-dot = eta, eta-dot = -Gamma(eta,eta) - G^{-1} grad E on a
/// Riemannian base, with S = int (eta^T G eta / 2 - E).
pub fn integrate_riemannian(
    metric: &dyn Metric,
    potential: &dyn Potential,
    a0: &[f64],
    eta0: &[f64],
    total_time: f64,
    dt: f64,
) -> Result<ClassicalTrajectory> {
    let n = potential.dim();
    if metric.dim() != n || a0.len() != n || eta0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "metric dimension {} vs potential dimension {n}",
            metric.dim()
        )));
    }
    let steps = steps_for(total_time, dt)?;
    let kinetic = |a: &[f64], eta: &[f64]| -> Result<f64> {
        let g = metric.metric(a);
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += 0.5 * eta[i] * g[(i, j)] * eta[j];
            }
        }
        Ok(acc)
    };
    let mut rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (a, eta) = (&y[..n], &y[n..2 * n]);
        if metric.metric(a).cholesky().is_none() {
            return Err(Error::DegenerateMetric { time: t });
        }
        let gamma = metric.christoffel(a).ok_or(Error::DegenerateMetric { time: t })?;
        let inv = metric.inverse_metric(a).ok_or(Error::DegenerateMetric { time: t })?;
        let grad = potential.gradient(a);
        let mut dy = Vec::with_capacity(2 * n + 1);
        dy.extend_from_slice(eta);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                for k in 0..n {
                    acc -= gamma[i][(j, k)] * eta[j] * eta[k];
                }
                acc -= inv[(i, j)] * grad[j];
            }
            dy.push(acc);
        }
        dy.push(kinetic(a, eta)? - potential.value(a));
        Ok(dy)
    };
    let mut y: Vec<f64> = a0.iter().chain(eta0).copied().chain([0.0]).collect();
    let mut traj = ClassicalTrajectory {
        times: Vec::with_capacity(steps + 1),
        position: Vec::with_capacity(steps + 1),
        momentum: Vec::with_capacity(steps + 1),
        action: Vec::with_capacity(steps + 1),
        energy: Vec::with_capacity(steps + 1),
        a_mat: None,
        b_mat: None,
    };
    for s in 0..=steps {
        let t = s as f64 * dt;
        let (a, eta) = (y[..n].to_vec(), y[n..2 * n].to_vec());
        if !potential.contains(&a) {
            return Err(Error::DomainExit { time: t });
        }
        traj.energy.push(kinetic(&a, &eta)? + potential.value(&a));
        traj.times.push(t);
        traj.position.push(a);
        traj.momentum.push(eta);
        traj.action.push(y[2 * n]);
        if s < steps {
            y = rk4_step(&mut rhs, t, &y, dt)?;
        }
    }
    Ok(traj)
}
