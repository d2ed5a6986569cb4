//! Classical motion in the effective band potential of the standard
//! scenario, with the accumulated action and the energy drift of the
//! integrator.

use tubelab::classical::integrate_flat;
use tubelab::scenarios::build_scenario;

fn main() -> tubelab::Result<()> {
    let sc = build_scenario("standard", &[("eta0", 0.6)])?;
    let pot = sc.effective_potential(0.05)?;
    let (x0, eta0) = sc.initial();
    let traj = integrate_flat(&pot, &[x0], &[eta0], 6.0, 1e-3)?;

    let e0 = traj.energy[0];
    let drift = traj.energy.iter().fold(0.0f64, |m, e| m.max((e - e0).abs()));
    println!("standard scenario, eta0 = 0.6, T = 6:");
    for i in (0..traj.len()).step_by(traj.len() / 12) {
        println!(
            "  t = {:4.1}  x = {:7.4}  eta = {:7.4}  S = {:8.4}",
            traj.times[i], traj.position[i][0], traj.momentum[i][0], traj.action[i]
        );
    }
    println!("energy drift over the run: {drift:.3e}");
    Ok(())
}
