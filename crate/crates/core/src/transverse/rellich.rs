//! Closed forms for the 2x2 eigenvalue-crossing family: the matrix
//! R(x) = (1/4)[I + x1 sigma3 + x2 sigma1] has eigenvalues omega_pm^2 with
//! omega_pm = (1/2)(1 +- |x|)^{1/2}, and the transverse operator
//!     h(x) = -(1/2) Lap_y + <R(x) y, y> / (2 a^2)
//! is a pair of uncoupled oscillators along the eigenframe of R(x). The
//! eigenframe rotates at half the angle of x, so the excited pair is
//! discontinuous along a cut; the half-angle rotation of that pair gives a
//! basis smooth through the origin, and the crossing matrix element couples
//! the two smooth states.

use crate::error::{Error, Result};
use crate::numerics::smoothstep5;

#[derive(Clone, Copy, Debug)]
pub struct RellichModel {
    /// squeeze parameter, shared by both normal directions
    pub a: f64,
}

/// Angle of x with branch phi in [-pi/2, 3pi/2): the cut sits on the
/// negative x2 semiaxis.
pub fn branch_angle(x: [f64; 2]) -> f64 {
    let mut phi = x[1].atan2(x[0]);
    if phi < -std::f64::consts::FRAC_PI_2 {
        phi += 2.0 * std::f64::consts::PI;
    }
    phi
}

/// Global cut function: 1 for |z| < 1/2, 0 for |z| > 3/5, quintic smoothstep
/// in between.
pub fn cut_function(z: f64) -> f64 {
    let r = z.abs();
    if r < 0.5 {
        1.0
    } else if r > 0.6 {
        0.0
    } else {
        1.0 - smoothstep5((r - 0.5) / 0.1)
    }
}

impl RellichModel {
    /// (omega_plus, omega_minus) at x; requires |x| < 1.
    pub fn omegas(&self, x: [f64; 2]) -> Result<(f64, f64)> {
        let r = x[0].hypot(x[1]);
        if r >= 1.0 {
            return Err(Error::OutOfDomain { value: r, lo: 0.0, hi: 1.0 });
        }
        Ok((0.5 * (1.0 + r).sqrt(), 0.5 * (1.0 - r).sqrt()))
    }

    fn check_region(&self, x: [f64; 2]) -> Result<f64> {
        let r = x[0].hypot(x[1]);
        if r >= 0.5 {
            return Err(Error::OutOfDomain { value: r, lo: 0.0, hi: 0.5 });
        }
        Ok(r)
    }

    /// The confining potential <R(x) y, y> / 2 in the normal coordinates.
    pub fn transverse_potential(&self, x: [f64; 2], y: [f64; 2]) -> f64 {
        0.5 * (0.25 * (y[0] * y[0] + y[1] * y[1])
            + 0.25 * x[0] * (y[0] * y[0] - y[1] * y[1])
            + 0.5 * x[1] * y[0] * y[1])
    }

    /// E_{n+,n-}(x) = (omega_+ + omega_-)/(2a) + n_+ omega_+/a + n_- omega_-/a.
    pub fn spectrum(&self, x: [f64; 2], n_plus: usize, n_minus: usize) -> Result<f64> {
        self.check_region(x)?;
        let (wp, wm) = self.omegas(x)?;
        Ok((wp + wm) / (2.0 * self.a) + (n_plus as f64 * wp + n_minus as f64 * wm) / self.a)
    }

    /// Eigenframe of R(x): v_plus at angle phi/2, v_minus orthogonal.
    fn frame(&self, x: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let half = 0.5 * branch_angle(x);
        let (s, c) = half.sin_cos();
        ([c, s], [-s, c])
    }

    /// Ground state Phi_{0,0}(x, y): normalized Gaussian with covariance set
    /// by R(x)^{1/2}/a; smooth in x because R^{1/2} is.
    pub fn ground_state(&self, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
        self.check_region(x)?;
        let (wp, wm) = self.omegas(x)?;
        let (vp, vm) = self.frame(x);
        let yp = vp[0] * y[0] + vp[1] * y[1];
        let ym = vm[0] * y[0] + vm[1] * y[1];
        let quad = wp * yp * yp + wm * ym * ym;
        let norm = (wp * wm / (self.a * self.a)).powf(0.25) / std::f64::consts::PI.sqrt();
        Ok(norm * (-quad / (2.0 * self.a)).exp())
    }

    /// The raw excited pair (Phi_{0,1}, Phi_{1,0}); discontinuous across the
    /// cut because the half-angle frame flips sign there.
    pub fn excited_pair(&self, x: [f64; 2], y: [f64; 2]) -> Result<(f64, f64)> {
        self.check_region(x)?;
        let (wp, wm) = self.omegas(x)?;
        let (vp, vm) = self.frame(x);
        let yp = vp[0] * y[0] + vp[1] * y[1];
        let ym = vm[0] * y[0] + vm[1] * y[1];
        let g = self.ground_state(x, y)?;
        let phi01 = (2.0 * wm / self.a).sqrt() * ym * g;
        let phi10 = (2.0 * wp / self.a).sqrt() * yp * g;
        Ok((phi01, phi10))
    }

    /// The smooth basis (Phi_A, Phi_B): the half-angle rotation of the raw
    /// pair, continuous across the cut and through x = 0.
    pub fn smooth_basis(&self, x: [f64; 2], y: [f64; 2]) -> Result<(f64, f64)> {
        let (phi01, phi10) = self.excited_pair(x, y)?;
        let half = 0.5 * branch_angle(x);
        let (s, c) = half.sin_cos();
        Ok((s * phi01 - c * phi10, c * phi01 + s * phi10))
    }

    /// <Phi_B, h(x) Phi_A> = sin(phi/2) cos(phi/2) (omega_- - omega_+)/a;
    /// near the origin this is -x2/(4a) + O(|x|^3).
    pub fn crossing_matrix_element(&self, x: [f64; 2]) -> Result<f64> {
        self.check_region(x)?;
        let (wp, wm) = self.omegas(x)?;
        let half = 0.5 * branch_angle(x);
        Ok(half.sin() * half.cos() * (wm - wp) / self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const M: RellichModel = RellichModel { a: 1.0 };

    fn quad2d(f: &dyn Fn(f64, f64) -> f64, l: f64, n: usize) -> f64 {
        let h = 2.0 * l / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
                let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
                let w = wi * wj;
                acc += w * f(-l + i as f64 * h, -l + j as f64 * h);
            }
        }
        acc * h * h
    }

    #[test]
    fn spectrum_values() {
        assert_abs_diff_eq!(M.spectrum([0.0, 0.0], 0, 0).unwrap(), 0.5, epsilon = 1e-12);
        let e = M.spectrum([0.3, 0.0], 0, 0).unwrap();
        assert_abs_diff_eq!(e, 0.25 * (1.3f64.sqrt() + 0.7f64.sqrt()), epsilon = 1e-12);
    }

    #[test]
    fn trace_identity_and_ordering() {
        for &x in &[[0.0, 0.0], [0.3, 0.2], [-0.5, 0.4], [0.0, -0.9]] {
            let (wp, wm) = M.omegas(x).unwrap();
            assert_abs_diff_eq!(wp * wp + wm * wm, 0.5, epsilon = 1e-12);
            assert!(wp >= wm && wm > 0.0);
            // degeneracy guard inside the working region
            if x[0].hypot(x[1]) < 0.5 {
                assert!(wp < 2.0 * wm);
            }
        }
    }

    #[test]
    fn crossing_only_at_origin() {
        // E_{0,1} = E_{1,0} iff omega_+ = omega_- iff |x| = 0
        let e01 = M.spectrum([0.2, 0.1], 0, 1).unwrap();
        let e10 = M.spectrum([0.2, 0.1], 1, 0).unwrap();
        assert!((e01 - e10).abs() > 1e-3);
        let e01 = M.spectrum([0.0, 0.0], 0, 1).unwrap();
        let e10 = M.spectrum([0.0, 0.0], 1, 0).unwrap();
        assert_abs_diff_eq!(e01, e10, epsilon = 1e-14);
    }

    #[test]
    fn ground_state_normalized_and_isotropic_at_origin() {
        let g = |y1: f64, y2: f64| M.ground_state([0.0, 0.0], [y1, y2]).unwrap();
        // exponent -|y|^2/(4a) at x = 0
        let v = g(1.3, -0.4);
        let expect = (0.25f64).powf(0.25) / std::f64::consts::PI.sqrt()
            * (-(1.3f64 * 1.3 + 0.16) / 4.0).exp();
        assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
        let norm = quad2d(&|y1, y2| g(y1, y2).powi(2), 12.0, 400);
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
        let norm3 = quad2d(
            &|y1, y2| M.ground_state([0.3, 0.1], [y1, y2]).unwrap().powi(2),
            14.0,
            400,
        );
        assert_abs_diff_eq!(norm3, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn ground_state_smooth_across_cut() {
        // the cut is the negative x2 axis; reflect x across it
        let r = 0.2;
        let eps = 1e-9;
        for &y in &[[0.4, -1.1], [1.0, 0.3]] {
            let above = M.ground_state([eps, -r], y).unwrap();
            let below = M.ground_state([-eps, -r], y).unwrap();
            assert_abs_diff_eq!(above, below, epsilon = 1e-8);
        }
    }

    #[test]
    fn ground_state_is_eigenfunction() {
        // residual of h(x) Phi - E Phi by finite differences on a grid
        let x = [0.25, -0.15];
        let e = M.spectrum(x, 0, 0).unwrap();
        let h = 1e-3;
        let mut num = 0.0f64;
        let mut den = 0.0f64;
        for i in -12..=12 {
            for j in -12..=12 {
                let y = [0.25 * i as f64, 0.25 * j as f64];
                let phi = |y1: f64, y2: f64| M.ground_state(x, [y1, y2]).unwrap();
                let lap = (phi(y[0] + h, y[1]) + phi(y[0] - h, y[1]) + phi(y[0], y[1] + h)
                    + phi(y[0], y[1] - h)
                    - 4.0 * phi(y[0], y[1]))
                    / (h * h);
                let r = -0.5 * lap + M.transverse_potential(x, y) * phi(y[0], y[1])
                    - e * phi(y[0], y[1]);
                num += r * r;
                den += phi(y[0], y[1]).powi(2);
            }
        }
        assert!((num / den).sqrt() < 1e-6, "residual {}", (num / den).sqrt());
    }

    #[test]
    fn smooth_basis_continuous_raw_pair_not() {
        let r = 0.2;
        let eps = 1e-9;
        let y = [0.7, -0.3];
        let (a_above, b_above) = M.smooth_basis([eps, -r], y).unwrap();
        let (a_below, b_below) = M.smooth_basis([-eps, -r], y).unwrap();
        assert_abs_diff_eq!(a_above, a_below, epsilon = 1e-8);
        assert_abs_diff_eq!(b_above, b_below, epsilon = 1e-8);
        let (p01_above, _) = M.excited_pair([eps, -r], y).unwrap();
        let (p01_below, _) = M.excited_pair([-eps, -r], y).unwrap();
        assert!((p01_above - p01_below).abs() > 1e-3);
        // through the origin: Phi_A at tiny |x| matches the x -> 0 limit
        let (a0, _) = M.smooth_basis([1e-12, 0.0], y).unwrap();
        let (a1, _) = M.smooth_basis([1e-7, 1e-7], y).unwrap();
        assert_abs_diff_eq!(a0, a1, epsilon = 1e-6);
    }

    #[test]
    fn smooth_basis_parity_on_positive_axis() {
        // phi = 0 there: Phi_A = -Phi_{1,0}, odd in y
        let x = [0.3, 0.0];
        let y = [0.8, 0.25];
        let (pa, _) = M.smooth_basis(x, y).unwrap();
        let (_, p10) = M.excited_pair(x, y).unwrap();
        assert_abs_diff_eq!(pa, -p10, epsilon = 1e-12);
        let (pa_neg, pb_neg) = M.smooth_basis(x, [-y[0], -y[1]]).unwrap();
        let (pa_pos, pb_pos) = M.smooth_basis(x, y).unwrap();
        assert_abs_diff_eq!(pa_neg, -pa_pos, epsilon = 1e-12);
        assert_abs_diff_eq!(pb_neg, -pb_pos, epsilon = 1e-12);
    }

    #[test]
    fn basis_orthonormal() {
        let x = [0.2, -0.3];
        let states = |y1: f64, y2: f64| -> [f64; 3] {
            let g = M.ground_state(x, [y1, y2]).unwrap();
            let (a, b) = M.smooth_basis(x, [y1, y2]).unwrap();
            [g, a, b]
        };
        for i in 0..3 {
            for j in 0..3 {
                let ip = quad2d(&|y1, y2| states(y1, y2)[i] * states(y1, y2)[j], 14.0, 400);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(ip, expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn crossing_element_values() {
        // on the positive x1 axis: zero
        assert_abs_diff_eq!(
            M.crossing_matrix_element([0.3, 0.0]).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        // near the origin: -x2/4 to better than 1%
        for &x2 in &[0.05, -0.05, 0.02] {
            let v = M.crossing_matrix_element([0.0, x2]).unwrap();
            assert!((v - (-x2 / 4.0)).abs() < 0.01 * (x2 / 4.0).abs(), "{v} vs {}", -x2 / 4.0);
        }
    }

    #[test]
    fn crossing_element_matches_quadrature() {
        let x = [0.1, -0.25];
        let closed = M.crossing_matrix_element(x).unwrap();
        let h = 1e-3;
        let ip = quad2d(
            &|y1, y2| {
                let (_, b) = M.smooth_basis(x, [y1, y2]).unwrap();
                let pa = |u: f64, v: f64| M.smooth_basis(x, [u, v]).unwrap().0;
                let lap = (pa(y1 + h, y2) + pa(y1 - h, y2) + pa(y1, y2 + h) + pa(y1, y2 - h)
                    - 4.0 * pa(y1, y2))
                    / (h * h);
                b * (-0.5 * lap + M.transverse_potential(x, [y1, y2]) * pa(y1, y2))
            },
            10.0,
            250,
        );
        assert_abs_diff_eq!(closed, ip, epsilon = 1e-6);
    }

    #[test]
    fn cut_function_profile() {
        assert_eq!(cut_function(0.3), 1.0);
        assert_eq!(cut_function(-0.45), 1.0);
        assert_eq!(cut_function(0.7), 0.0);
        assert!(cut_function(0.55) > 0.0 && cut_function(0.55) < 1.0);
        assert_abs_diff_eq!(cut_function(0.55), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn fd2d_ground_matches_closed_form() {
        use crate::transverse::fd_eigensolve_2d;
        let x = [0.3, 0.0];
        let closed = M.spectrum(x, 0, 0).unwrap();
        let pairs = fd_eigensolve_2d(
            &|y1, y2| M.transverse_potential(x, [y1, y2]),
            12.0,
            383,
            1,
        )
        .unwrap();
        assert_abs_diff_eq!(pairs[0].energy, closed, epsilon = 1e-4);
    }
}
