//! Reference solver sanity: a coherent state in an isotropic harmonic well
//! returns to itself after one classical period.

use nalgebra::DMatrix;
use num_complex::Complex64;
use tubelab::packets::{evaluate_packet, PacketParams};
use tubelab::quantum::{Grid2D, GridState, Propagator};

fn main() -> tubelab::Result<()> {
    let hbar = 0.05;
    let grid = Grid2D::new((-2.0, 2.0), (-2.0, 2.0), 256, 256)?;
    let eye = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0))
        + DMatrix::identity(2, 2).map(|x: f64| Complex64::new(x, 0.0));

    let packet =
        PacketParams::new(hbar, vec![0.7, 0.0], vec![0.0, 0.0], eye.clone(), eye, vec![0, 0])?;
    let mut points = Vec::with_capacity(grid.len());
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            points.push(vec![grid.x(ix), grid.y(iy)]);
        }
    }
    let values = evaluate_packet(&packet, &points)?;
    let mut state = GridState::zeros(grid, hbar);
    for ix in 0..grid.nx {
        for iy in 0..grid.ny {
            state.values[grid.idx(ix, iy)] = values[ix * grid.ny + iy];
        }
    }
    state.normalize();
    let initial = state.clone();

    let period = 2.0 * std::f64::consts::PI;
    let steps = 4000;
    let mut prop =
        Propagator::new(grid, &|x, y| 0.5 * (x * x + y * y), hbar, period / steps as f64)?;
    prop.propagate(&mut state, steps)?;

    let overlap = state.inner(&initial)?.norm();
    println!("coherent state, one period in {steps} steps:");
    println!("  norm after evolution: {:.12}", state.norm());
    println!("  fidelity |<psi(T), psi(0)>| = {overlap:.12}");
    Ok(())
}
