//! A small end-to-end convergence study on the flat scenario: propagate a
//! grid reference, evolve the semiclassical data, and fit the L2 gap
//! against hbar. The hbar values here are large so the example runs in
//! seconds; the acceptance sweep goes to hbar = 0.01.

use tubelab::scenarios::{build_scenario, convergence_study};

fn main() -> tubelab::Result<()> {
    let sc = build_scenario("standard", &[("horizon", 0.5), ("eta0", 0.2)])?;
    let out = convergence_study(&sc, &[0.16, 0.08, 0.04], 0.45, 2)?;

    println!("hbar      raw L2        phase-opt L2   grid");
    for r in &out.result.runs {
        println!(
            "{:.3}    {:.6e}  {:.6e}   {}x{}",
            r.hbar, r.l2_error_raw, r.l2_error_phase_opt, r.grid_nx, r.grid_ny
        );
    }
    println!(
        "\nfitted slope {:.4} (threshold {}), pass = {}",
        out.result.slope, out.result.threshold, out.result.pass
    );
    println!("max deviation of the base speed: {:.2e}", out.max_speed_deviation);
    Ok(())
}
