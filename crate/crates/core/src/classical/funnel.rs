use super::integrate::{rk4_step, ClassicalTrajectory};
use crate::error::{Error, Result};

/// One member of the funnel family: the homogenized potential
/// U(x) = theta_plus w_plus(|x|) + theta_minus w_minus(|x|) with
/// w_pm(r) = (1 pm r)^{1/2} / 2, started at the vertex x = 0.
#[derive(Debug, Clone, Copy)]
pub struct FunnelSpec {
    pub theta_plus: f64,
    pub theta_minus: f64,
    /// initial velocity (already projected onto the x-plane)
    pub v_star: [f64; 2],
    pub horizon: f64,
}

pub fn funnel_potential(theta_plus: f64, theta_minus: f64, r: f64) -> f64 {
    0.5 * (theta_plus * (1.0 + r).sqrt() + theta_minus * (1.0 - r).sqrt())
}

/// dU/dr; at r = 0 this is the one-sided limit (theta_plus - theta_minus)/4.
pub fn funnel_radial_derivative(theta_plus: f64, theta_minus: f64, r: f64) -> f64 {
    0.25 * (theta_plus / (1.0 + r).sqrt() - theta_minus / (1.0 - r).sqrt())
}

/// Integrates x-ddot = -grad U from x(0) = 0, x-dot(0) = v_star. U depends
/// only on |x|, so the gradient direction at the vertex is taken along the
/// launch ray.
pub fn takens_funnel(spec: &FunnelSpec, dt: f64) -> Result<ClassicalTrajectory> {
    let speed = (spec.v_star[0].powi(2) + spec.v_star[1].powi(2)).sqrt();
    if speed == 0.0 {
        return Err(Error::DegenerateFunnelVelocity);
    }
    if spec.theta_plus < 0.0 || spec.theta_minus < 0.0 {
        return Err(Error::Config("adiabatic invariants must be nonnegative".into()));
    }
    if !(dt > 0.0) || !(spec.horizon > 0.0) {
        return Err(Error::Config(format!(
            "need positive horizon and step, got T={}, dt={dt}",
            spec.horizon
        )));
    }
    let ray = [spec.v_star[0] / speed, spec.v_star[1] / speed];
    let (tp, tm) = (spec.theta_plus, spec.theta_minus);
    let steps = (spec.horizon / dt).round().max(1.0) as usize;
    let mut rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let dir = if r < 1e-12 { ray } else { [y[0] / r, y[1] / r] };
        let du = funnel_radial_derivative(tp, tm, r);
        Ok(vec![y[2], y[3], -du * dir[0], -du * dir[1], 0.5 * (y[2] * y[2] + y[3] * y[3]) - funnel_potential(tp, tm, r)])
    };
    let mut y = vec![0.0, 0.0, spec.v_star[0], spec.v_star[1], 0.0];
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
        let r = (y[0] * y[0] + y[1] * y[1]).sqrt();
        if r >= 0.5 {
            return Err(Error::DomainExit { time: t });
        }
        traj.times.push(t);
        traj.position.push(vec![y[0], y[1]]);
        traj.momentum.push(vec![y[2], y[3]]);
        traj.action.push(y[4]);
        traj.energy.push(0.5 * (y[2] * y[2] + y[3] * y[3]) + funnel_potential(tp, tm, r));
        if s < steps {
            y = rk4_step(&mut rhs, t, &y, dt)?;
        }
    }
    Ok(traj)
}
