//! Tubular coordinates around a plane curve: round trips, the chart
//! Jacobian, and the curvature-induced extra potential.

use tubelab::geometry::{PlaneCurve, TubularChart};

fn main() -> tubelab::Result<()> {
    let curve = PlaneCurve::circle(2.0, [0.0, 0.0]);
    let chart = TubularChart::new(curve, 0.9)?;

    println!("circle of radius 2, tube half width 0.9");
    for &(s, u) in &[(0.0, 0.0), (1.3, 0.4), (4.0, -0.7), (11.0, 0.85)] {
        let q = chart.to_cartesian(s, u)?;
        let (s2, u2) = chart.from_cartesian(q)?;
        println!(
            "  (s, u) = ({s:5.2}, {u:5.2}) -> ({:7.4}, {:7.4}) -> ({s2:7.4}, {u2:7.4})",
            q[0], q[1]
        );
    }

    // Q enters the kinetic operator as -Q, so the induced potential for a
    // curve is the attractive -k^2/8 on the curve itself
    let k = chart.curve().curvature(1.0)?;
    println!("\ncurvature k = {k:.6}, extrapotential Q on the curve:");
    println!("  chart:       {:.10}", chart.extrapotential(1.0, 0.0)?);
    println!("  closed form: {:.10}", k * k / 8.0);
    Ok(())
}
