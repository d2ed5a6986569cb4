//! The quasi-exactly-solvable sextic oscillator: at a tuned quartic
//! coefficient the ground state is an explicit Gaussian-like function and
//! its energy is algebraic. The tuning condition depends on the kinetic
//! normalization, which is easy to get wrong; both are checked here.

use tubelab::transverse::{sextic_qes_check, KineticConvention};

fn main() -> tubelab::Result<()> {
    let v6 = 1.0;

    let v4 = 12.0f64.sqrt();
    let unit = sextic_qes_check(v4, v6, KineticConvention::Unit)?;
    println!("kinetic -d^2/du^2, V4 = sqrt(12), V6 = 1:");
    println!("  condition satisfied: {}", unit.qes_condition_satisfied);
    println!("  closed form E0 = {:.12}  (sqrt 3 = {:.12})", unit.closed_form_energy, 3.0f64.sqrt());
    println!("  numeric     E0 = {:.12}", unit.numeric_energy);

    let v4 = (6.0 * 2.0f64.sqrt()).sqrt();
    let half = sextic_qes_check(v4, v6, KineticConvention::Half)?;
    println!("\nkinetic -(1/2) d^2/du^2, V4^2 = 6 sqrt(2), V6 = 1:");
    println!("  condition satisfied: {}", half.qes_condition_satisfied);
    println!("  closed form E0 = {:.12}", half.closed_form_energy);
    println!("  numeric     E0 = {:.12}", half.numeric_energy);

    // the same V4 under the wrong convention misses the tuning
    let wrong = sextic_qes_check(12.0f64.sqrt(), v6, KineticConvention::Half)?;
    println!(
        "\nV4 = sqrt(12) under the half convention: condition satisfied = {}",
        wrong.qes_condition_satisfied
    );
    Ok(())
}
