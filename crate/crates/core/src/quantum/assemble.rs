use num_complex::Complex64;

use super::grid::{Grid2D, GridState};
use crate::error::{Error, Result};
use crate::geometry::TubularChart;
use crate::numerics::{oscillator_eigenfunctions, smoothstep5};
use crate::packets::{evaluate_packet, PacketParams};

/// Compactly supported plateau function: 1 within the inner radius of the
/// centre, 0 beyond the outer radius, quintic in between. The longitudinal
/// and (optional) transverse factors are independent.
#[derive(Debug, Clone, Copy)]
pub struct CutSpec {
    pub s_center: f64,
    pub s_inner: f64,
    pub s_outer: f64,
    /// transverse radii apply to the physical normal offset; set to
    /// infinity for flat assemblies cut only along the base
    pub u_inner: f64,
    pub u_outer: f64,
    /// period of the s coordinate for closed charts
    pub period: Option<f64>,
}

impl CutSpec {
    pub fn validate(&self) -> Result<()> {
        let u_ok = (self.u_inner.is_infinite() && self.u_outer.is_infinite())
            || (self.u_inner > 0.0 && self.u_outer > self.u_inner);
        let ok = self.s_inner > 0.0 && self.s_outer > self.s_inner && u_ok;
        if !ok {
            return Err(Error::Config(format!("cut radii must be nested and positive: {self:?}")));
        }
        Ok(())
    }

    fn plateau(d: f64, inner: f64, outer: f64) -> f64 {
        if d <= inner {
            1.0
        } else if d >= outer {
            0.0
        } else {
            smoothstep5((outer - d) / (outer - inner))
        }
    }

    pub fn eval(&self, s: f64, u: f64) -> f64 {
        let mut d = (s - self.s_center).abs();
        if let Some(l) = self.period {
            d = d.rem_euclid(l);
            d = d.min(l - d);
        }
        let long = Self::plateau(d, self.s_inner, self.s_outer);
        if self.u_outer.is_infinite() {
            return long;
        }
        long * Self::plateau(u.abs(), self.u_inner, self.u_outer)
    }
}

/// Normalized transverse bound state at frozen base point, in the dilated
/// normal variable, together with its energy band.
pub trait TransverseProfile: Sync {
    fn eval(&self, x: f64, u: f64) -> f64;
    /// E_n(x), the effective potential for the base motion.
    fn energy(&self, x: f64) -> f64;

    fn d_eval_dx(&self, x: f64, u: f64) -> f64 {
        let h = 1e-4 * (1.0 + x.abs());
        (self.eval(x - 2.0 * h, u) - 8.0 * self.eval(x - h, u) + 8.0 * self.eval(x + h, u)
            - self.eval(x + 2.0 * h, u))
            / (12.0 * h)
    }
}

/// Harmonic channel: frequency omega(x), squeeze a, mode n; effective
/// frequency of the dilated oscillator is omega/a.
pub struct HarmonicProfile {
    pub omega: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    /// longitudinal potential evaluated on the base
    pub v0: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub squeeze: f64,
    pub n: usize,
}

impl HarmonicProfile {
    pub fn beta(&self, x: f64) -> f64 {
        (self.omega)(x) / self.squeeze
    }
}

impl TransverseProfile for HarmonicProfile {
    fn eval(&self, x: f64, u: f64) -> f64 {
        oscillator_eigenfunctions(self.n, self.beta(x), u)[self.n]
    }

    fn energy(&self, x: f64) -> f64 {
        (self.n as f64 + 0.5) * self.beta(x) + (self.v0)(x)
    }
}

/// The order-hbar transverse correction for a harmonic ground-state channel:
/// the reduced resolvent applied to the four source terms
/// i eta dPhi/ds, -eta^2 k u Phi, -dV/du u Phi, -(1/6a^2) d^3W/du^3 u^3 Phi.
/// For the ground state everything lands on modes 1..3 in closed form.
pub struct HarmonicGroundCorrection {
    /// effective frequency beta(s) = omega(s)/a
    pub beta: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    /// curvature of the base curve (zero for flat charts)
    pub curvature: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    /// normal derivative of the longitudinal potential on the curve
    pub dv_du: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    /// third normal derivative of the confining potential on the curve
    pub d3w_du3: Box<dyn Fn(f64) -> f64 + Sync + Send>,
    pub squeeze: f64,
}

impl HarmonicGroundCorrection {
    fn dbeta_ds(&self, s: f64) -> f64 {
        let h = 1e-4 * (1.0 + s.abs());
        ((self.beta)(s - 2.0 * h) - 8.0 * (self.beta)(s - h) + 8.0 * (self.beta)(s + h)
            - (self.beta)(s + 2.0 * h))
            / (12.0 * h)
    }

    /// Coefficients (c1, c2, c3) on the modes (Phi_1, i Phi_2, Phi_3).
    pub fn coefficients(&self, s: f64, eta: f64) -> (f64, f64, f64) {
        let b = (self.beta)(s);
        let bp = self.dbeta_ds(s);
        let k = (self.curvature)(s);
        let vp = (self.dv_du)(s);
        let w3 = (self.d3w_du3)(s);
        let a2 = self.squeeze * self.squeeze;
        let sq2b = (2.0 * b).sqrt();
        // u Phi_0 = Phi_1 / sqrt(2 b); u^3 Phi_0 = (3 Phi_1 + sqrt6 Phi_3) / (2b)^{3/2};
        // d/ds Phi_0 = -(b'/(4b)) sqrt2 Phi_2; gaps are 1b, 2b, 3b
        let c1 = -(eta * eta * k + vp) / (b * sq2b) - w3 / (2.0 * a2 * b * sq2b.powi(3));
        let c2 = -eta * bp * std::f64::consts::SQRT_2 / (8.0 * b * b);
        let c3 = -w3 * 6.0f64.sqrt() / (18.0 * a2 * b * sq2b.powi(3));
        (c1, c2, c3)
    }

    pub fn eval(&self, s: f64, u: f64, eta: f64) -> Complex64 {
        let (c1, c2, c3) = self.coefficients(s, eta);
        let phi = oscillator_eigenfunctions(3, (self.beta)(s), u);
        Complex64::new(c1 * phi[1] + c3 * phi[3], c2 * phi[2])
    }
}

/// A built approximant together with its recorded renormalization constant
/// (the norm the raw samples were divided by; 1 + O(hbar^inf) when the cut
/// is wide).
pub struct Assembled {
    pub state: GridState,
    pub renorm: f64,
}

/// Flat-base approximant: packet in x times dilated transverse state,
/// psi = e^{i action/hbar} phi_k(x) F(x) dilation^{-1/2} Phi(x, y/dilation).
/// `dilation` is hbar for the standard wiring and a hbar^alpha in general.
pub fn assemble_flat(
    packet: &PacketParams,
    profile: &dyn TransverseProfile,
    cut: &CutSpec,
    grid: Grid2D,
    action: f64,
    dilation: f64,
) -> Result<Assembled> {
    cut.validate()?;
    if cut.s_center - cut.s_outer < grid.x0 || cut.s_center + cut.s_outer > grid.x1 {
        return Err(Error::Config(format!(
            "cut support [{}, {}] exits the grid x-range",
            cut.s_center - cut.s_outer,
            cut.s_center + cut.s_outer
        )));
    }
    let hbar = packet.hbar;
    let xs: Vec<Vec<f64>> = (0..grid.nx).map(|ix| vec![grid.x(ix)]).collect();
    let phi = evaluate_packet(packet, &xs)?;
    let phase = Complex64::new(0.0, action / hbar).exp();
    let mut st = GridState::zeros(grid, hbar);
    let amp = dilation.powf(-0.5);
    for ix in 0..grid.nx {
        let x = grid.x(ix);
        let f = cut.eval(x, 0.0);
        if f == 0.0 {
            continue;
        }
        let head = phase * phi[ix] * f * amp;
        for iy in 0..grid.ny {
            let u = grid.y(iy) / dilation;
            st.values[grid.idx(ix, iy)] = head * profile.eval(x, u);
        }
    }
    let renorm = st.normalize();
    Ok(Assembled { state: st, renorm })
}

/// Curved approximant on a tubular chart. In chart coordinates the state is
/// phi_k(s) F(s, u) Phi(s, u/hbar) (plus hbar psi2 when a correction is
/// given); it is pushed to the Cartesian grid through the inverse chart
/// isometry, dividing by the Jacobian root (1 - k u)^{1/2}, and the inverse
/// dilation.
pub fn assemble_curve(
    chart: &TubularChart,
    packet: &PacketParams,
    profile: &dyn TransverseProfile,
    cut: &CutSpec,
    grid: Grid2D,
    action: f64,
    correction: Option<&HarmonicGroundCorrection>,
) -> Result<Assembled> {
    cut.validate()?;
    if cut.u_outer.is_finite() && cut.u_outer > chart.half_width() {
        return Err(Error::Config(format!(
            "cut transverse radius {} exceeds the tube half-width {}",
            cut.u_outer,
            chart.half_width()
        )));
    }
    let hbar = packet.hbar;
    let eta = packet.momentum[0];
    let phase = Complex64::new(0.0, action / hbar).exp();
    let amp = hbar.powf(-0.5);
    let mut st = GridState::zeros(grid, hbar);
    // gather chart coordinates for every point under the cut, then evaluate
    // the packet for all of them in one pass
    let mut coords: Vec<(usize, f64, f64, f64)> = Vec::new();
    for ix in 0..grid.nx {
        let x = grid.x(ix);
        let mut guess: Option<f64> = None;
        for iy in 0..grid.ny {
            let q = [x, grid.y(iy)];
            // retry cold when a stale warm start fails on an interior point
            let res = match guess {
                Some(s) => chart.from_cartesian_guess(q, s).or_else(|_| chart.from_cartesian(q)),
                None => chart.from_cartesian(q),
            };
            let (mut s, u) = match res {
                Ok(su) => su,
                Err(_) => continue,
            };
            guess = Some(s);
            // on a closed chart move s to the branch nearest the packet
            // centre so the (non-periodic) packet sees a connected interval
            if let Some(l) = cut.period {
                let c = packet.centre[0];
                let mut d = (s - c).rem_euclid(l);
                if d > 0.5 * l {
                    d -= l;
                }
                s = c + d;
            }
            let f = cut.eval(s, u);
            if f == 0.0 {
                continue;
            }
            let w = chart.metric_jacobian(s, u)?;
            coords.push((grid.idx(ix, iy), s, u, f / w.sqrt()));
        }
    }
    let pts: Vec<Vec<f64>> = coords.iter().map(|(_, s, _, _)| vec![*s]).collect();
    let phi = evaluate_packet(packet, &pts)?;
    for ((idx, s, u, weight), packet_val) in coords.into_iter().zip(phi) {
        let ud = u / hbar;
        let mut transverse = Complex64::new(profile.eval(s, ud), 0.0);
        if let Some(corr) = correction {
            transverse += corr.eval(s, ud, eta) * hbar;
        }
        st.values[idx] = phase * packet_val * weight * amp * transverse;
    }
    let renorm = st.normalize();
    Ok(Assembled { state: st, renorm })
}
