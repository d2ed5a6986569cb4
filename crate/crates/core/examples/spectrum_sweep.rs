//! Transverse band energies over a sweep of base points: the harmonic
//! closed form (n + 1/2) omega(x) against a finite-difference eigensolver.

use tubelab::scenarios::build_scenario;
use tubelab::transverse::fd_eigensolve_1d_auto;

fn main() -> tubelab::Result<()> {
    let sc = build_scenario("standard", &[])?;
    println!("   x     n   closed form      numeric          diff");
    for i in 0..5 {
        let x = -1.0 + 0.5 * i as f64;
        let omega = sc.omega(x)?;
        let pot = move |u: f64| 0.5 * omega * omega * u * u;
        let width = 8.0 / omega.sqrt();
        for level in fd_eigensolve_1d_auto(&pot, 3, width, width / 3200.0)? {
            let closed = (level.index as f64 + 0.5) * omega;
            println!(
                "  {x:5.2}  {}   {closed:.10}   {:.10}   {:8.1e}",
                level.index,
                level.energy,
                (closed - level.energy).abs()
            );
        }
    }
    Ok(())
}
