//! How well the evolved approximant satisfies the local Schrodinger
//! equation: the residual norm per hbar with the order-hbar transverse
//! correction on and off. On a curved tube with a moving packet the
//! ablation costs half an order.

use tubelab::scenarios::{build_scenario, residual_sweep};

fn main() -> tubelab::Result<()> {
    let hbars = [0.08, 0.04, 0.02];

    let sc = build_scenario("standard", &[("x0", 0.0), ("eta0", 0.0)])?;
    let (res_on, slope_on) = residual_sweep(&sc, &hbars, 0.2, true)?;
    let (res_off, slope_off) = residual_sweep(&sc, &hbars, 0.2, false)?;
    println!("flat scenario at rest (no order-hbar sources):");
    for (i, h) in hbars.iter().enumerate() {
        println!("  hbar = {h:.2}: residual {:.4e} (on) {:.4e} (off)", res_on[i], res_off[i]);
    }
    println!("  slopes: {slope_on:.3} with correction, {slope_off:.3} without");

    let sc = build_scenario("circle", &[("eta0", 0.4)])?;
    let (res_on, slope_on) = residual_sweep(&sc, &hbars, 0.2, true)?;
    let (res_off, slope_off) = residual_sweep(&sc, &hbars, 0.2, false)?;
    println!("\ncircle scenario, eta0 = 0.4 (curvature couples to the motion):");
    for (i, h) in hbars.iter().enumerate() {
        println!("  hbar = {h:.2}: residual {:.4e} (on) {:.4e} (off)", res_on[i], res_off[i]);
    }
    println!("  slopes: {slope_on:.3} with correction, {slope_off:.3} without");
    Ok(())
}
