//! Waveguide-style confinement from a magnetic field: on the zero curve of
//! the effective vector potential the derived transverse frequency equals
//! the field gradient.

use tubelab::scenarios::build_scenario;

fn main() -> tubelab::Result<()> {
    let sc = build_scenario("magnetic-trap", &[])?;
    let (r0, kappa) = (sc.params["r0"], sc.params["kappa"]);
    let grad = |z: f64| {
        // |grad A| along r = r0 - kappa z^2 with A = (r - r0) + kappa z^2
        (1.0 + 4.0 * kappa * kappa * z * z).sqrt()
    };

    println!("trap r0 = {r0}, kappa = {kappa}");
    println!("    s       omega(s)          |grad A|          diff");
    let mut worst = 0.0f64;
    for i in 0..9 {
        let s = 0.1 + 0.25 * i as f64;
        let omega = sc.omega(s)?;
        // map arc length back to the z parameter through the scenario curve
        let z = match &sc.geometry {
            tubelab::scenarios::Geometry::Curve { curve, .. } => curve.point(s)?[1],
            _ => unreachable!("the trap lives on a curve"),
        };
        let g = grad(z);
        worst = worst.max((omega - g).abs());
        println!("  {s:5.2}  {omega:.12}  {:.12}  {:8.1e}", g, (omega - g).abs());
    }
    println!("largest deviation: {worst:.3e}");
    Ok(())
}
