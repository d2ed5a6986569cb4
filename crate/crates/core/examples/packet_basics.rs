//! Squeezed-packet ladder: build the first few excitations, check their
//! orthonormality by quadrature, and look at the position moments.

use nalgebra::DMatrix;
use num_complex::Complex64;
use tubelab::packets::{evaluate_packet, packet_moments, PacketParams};

fn main() -> tubelab::Result<()> {
    let hbar = 0.05;
    let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));

    // quadrature grid wide enough for the k = 4 state
    let n = 4000;
    let (lo, hi) = (-1.5f64, 3.5f64);
    let dx = (hi - lo) / n as f64;
    let points: Vec<Vec<f64>> = (0..n).map(|i| vec![lo + (i as f64 + 0.5) * dx]).collect();

    let mut values = Vec::new();
    for k in 0..5 {
        let p = PacketParams::new(hbar, vec![1.0], vec![0.3], one.clone(), one.clone(), vec![k])?;
        values.push(evaluate_packet(&p, &points)?);
    }

    println!("quadrature Gram matrix of the ladder k = 0..4:");
    for j in 0..5 {
        let row: Vec<String> = (0..5)
            .map(|k| {
                let g: Complex64 =
                    values[j].iter().zip(&values[k]).map(|(a, b)| a.conj() * b).sum::<Complex64>()
                        * dx;
                format!("{:9.2e}", if j == k { g.norm() - 1.0 } else { g.norm() })
            })
            .collect();
        println!("  {}", row.join(" "));
    }
    println!("(diagonal shows deviation from 1)");

    let p = PacketParams::new(hbar, vec![1.0], vec![0.3], one.clone(), one, vec![0])?;
    let m = packet_moments(&p);
    println!(
        "\nground packet: <x> = {:.4}, <p> = {:.4}, var x = {:.6} (hbar/2 = {:.6})",
        m.position[0],
        m.momentum[0],
        m.covariance[(0, 0)],
        hbar / 2.0
    );
    Ok(())
}
