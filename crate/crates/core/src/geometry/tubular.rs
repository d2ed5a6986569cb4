//! Tubular coordinates (s, u) around a plane curve: q(s, u) = q_M(s) + u n(s).
//!
//! The chart is a diffeomorphism as long as the Jacobian 1 - k(s)u stays
//! positive, which the constructor enforces over the whole strip.

use crate::error::{Error, Result};
use crate::geometry::PlaneCurve;

#[derive(Clone, Debug)]
pub struct TubularChart {
    curve: PlaneCurve,
    half_width: f64,
}

impl TubularChart {
    /// Tube of half-width delta around the curve; requires |k| delta < 1.
    pub fn new(curve: PlaneCurve, half_width: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Config("tube half_width must be positive".into()));
        }
        let kmax = curve.max_abs_curvature();
        if kmax * half_width >= 1.0 {
            return Err(Error::ChartWidth {
                s: 0.0,
                u: half_width,
                jacobian: 1.0 - kmax * half_width,
            });
        }
        Ok(TubularChart { curve, half_width })
    }

    pub fn curve(&self) -> &PlaneCurve {
        &self.curve
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn to_cartesian(&self, s: f64, u: f64) -> Result<[f64; 2]> {
        if u.abs() > self.half_width * (1.0 + 1e-12) {
            return Err(Error::OutOfDomain {
                value: u,
                lo: -self.half_width,
                hi: self.half_width,
            });
        }
        let p = self.curve.point(s)?;
        let n = self.curve.normal(s)?;
        Ok([p[0] + u * n[0], p[1] + u * n[1]])
    }

    /// Inverse chart. Cold start: coarse closest-point scan over the curve's
    /// internal sample table, then Newton on (q - q_M(s)) . T(s) = 0.
    pub fn from_cartesian(&self, q: [f64; 2]) -> Result<(f64, f64)> {
        let pts = self.curve.sample_points();
        let stride = self.curve.sample_stride();
        // scan a decimated table; the Newton basin is ~one period of the
        // curvature scale, far wider than 8 strides
        let step = 8;
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        let mut i = 0;
        while i < pts.len() {
            let dx = q[0] - pts[i][0];
            let dy = q[1] - pts[i][1];
            let d2 = dx * dx + dy * dy;
            if d2 < best_d2 {
                best_d2 = d2;
                best = i;
            }
            i += step;
        }
        self.from_cartesian_guess(q, best as f64 * stride)
    }

    /// Inverse chart with a warm start for s (grid sweeps, neighbor points).
    pub fn from_cartesian_guess(&self, q: [f64; 2], s_guess: f64) -> Result<(f64, f64)> {
        let l = self.curve.total_length();
        let mut s = s_guess;
        let mut converged = false;
        for _ in 0..60 {
            let p = self.curve.point(s)?;
            let t = self.curve.tangent(s)?;
            let k = self.curve.curvature(s)?;
            let dx = q[0] - p[0];
            let dy = q[1] - p[1];
            let f = dx * t[0] + dy * t[1];
            // f'(s) = -1 + k (q - q_M) . n
            let n = [-t[1], t[0]];
            let fp = -1.0 + k * (dx * n[0] + dy * n[1]);
            if fp.abs() < 1e-14 {
                break;
            }
            let mut step = -f / fp;
            let cap = 0.2 * l.max(1.0);
            step = step.clamp(-cap, cap);
            s += step;
            if !self.curve.is_closed() {
                s = s.clamp(0.0, l);
            }
            if step.abs() < 1e-13 * l.max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            // accept if the residual itself is tiny (clamped endpoint case)
            let p = self.curve.point(s)?;
            let t = self.curve.tangent(s)?;
            let f = (q[0] - p[0]) * t[0] + (q[1] - p[1]) * t[1];
            if f.abs() > 1e-9 {
                return Err(Error::NoConvergence {
                    iterations: 60,
                    residual: f.abs(),
                });
            }
        }
        if self.curve.is_closed() {
            s = s.rem_euclid(l);
        }
        let p = self.curve.point(s)?;
        let n = self.curve.normal(s)?;
        let u = (q[0] - p[0]) * n[0] + (q[1] - p[1]) * n[1];
        if u.abs() > self.half_width * (1.0 + 1e-9) {
            return Err(Error::OutOfTube {
                x: q[0],
                y: q[1],
                half_width: self.half_width,
            });
        }
        Ok((s, u))
    }

    /// g^{1/2}(s, u) = 1 - k(s) u; strictly positive on the chart.
    pub fn metric_jacobian(&self, s: f64, u: f64) -> Result<f64> {
        let k = self.curve.curvature(s)?;
        let w = 1.0 - k * u;
        if w <= 0.0 {
            return Err(Error::ChartWidth { s, u, jacobian: w });
        }
        Ok(w)
    }

    /// Extrapotential Q(s, u) defined so that, acting on the metric-flattened
    /// wavefunction f = (1 - ku)^{1/2} psi, the kinetic operator reads
    ///   -(1/2) Delta  ->  -(1/(2w^2)) dss - (k' u / w^3) ds - (1/2) duu - Q
    /// with w = 1 - k(s) u. Expanding the divergence form gives
    ///   Q = k^2/(8 w^2) + k'' u/(4 w^3) + (5/8) k'^2 u^2 / w^4.
    pub fn extrapotential(&self, s: f64, u: f64) -> Result<f64> {
        let (k, kd, kdd) = self.curve.curvature_derivs(s)?;
        let w = 1.0 - k * u;
        if w <= 0.0 {
            return Err(Error::ChartWidth { s, u, jacobian: w });
        }
        let w2 = w * w;
        Ok(k * k / (8.0 * w2) + kdd * u / (4.0 * w2 * w) + 0.625 * kd * kd * u * u / (w2 * w2))
    }
}
