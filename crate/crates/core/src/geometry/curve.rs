//! Plane curves reparametrized by arc length.
//!
//! Construction samples the user's parametrization once and stores dense
//! uniform-in-arc-length tables of position, unit tangent, and curvature
//! together with its first two arc-length derivatives. All queries are
//! cubic Hermite interpolation with exact nodal slopes (q' = T, T' = k n,
//! k' and k'' from the tables), so evaluation never touches the original
//! closure again and the curve is plain data: Clone + Send + Sync.

use crate::error::{Error, Result};
use crate::numerics::{deriv1, deriv2, gauss_legendre_16};

const DEGENERATE_SPEED: f64 = 1e-12;
const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct PlaneCurve {
    closed: bool,
    total_length: f64,
    ds: f64,
    pts: Vec<[f64; 2]>,
    tans: Vec<[f64; 2]>,
    k: Vec<f64>,
    kd: Vec<f64>,
    kdd: Vec<f64>,
    kd3: Vec<f64>,
    coarse_t: Vec<f64>,
    coarse_s: Vec<f64>,
}

fn rot90(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

/// Cubic Hermite on [0, h] at fraction theta, slopes in per-unit-s.
fn hermite(f0: f64, f1: f64, m0: f64, m1: f64, h: f64, theta: f64) -> f64 {
    let t = theta;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * f0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * f1
        + (t3 - t2) * h * m1
}

/// 4th-order derivative of a uniformly sampled table; one-sided stencils at
/// the ends of open curves, wrap-around for closed ones (last node = first).
fn table_deriv(v: &[f64], h: f64, closed: bool) -> Vec<f64> {
    let n = v.len();
    let mut out = vec![0.0; n];
    let central = |m2: f64, m1: f64, p1: f64, p2: f64| (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
    if closed {
        // period n-1 samples; v[n-1] == v[0]
        let p = n - 1;
        let at = |i: isize| v[i.rem_euclid(p as isize) as usize];
        for j in 0..p {
            let j = j as isize;
            out[j as usize] = central(at(j - 2), at(j - 1), at(j + 1), at(j + 2));
        }
        out[n - 1] = out[0];
        return out;
    }
    for j in 2..n - 2 {
        out[j] = central(v[j - 2], v[j - 1], v[j + 1], v[j + 2]);
    }
    let fwd = |i: usize, sign: f64, get: &dyn Fn(usize) -> f64| {
        sign * (-25.0 * get(i) + 48.0 * get(i + 1) - 36.0 * get(i + 2) + 16.0 * get(i + 3)
            - 3.0 * get(i + 4))
            / (12.0 * h)
    };
    let id = |i: usize| v[i];
    let rev = |i: usize| v[n - 1 - i];
    out[0] = fwd(0, 1.0, &id);
    out[1] = fwd(1, 1.0, &id);
    out[n - 1] = fwd(0, -1.0, &rev);
    out[n - 2] = fwd(1, -1.0, &rev);
    out
}

impl PlaneCurve {
    /// Arc-length parametrization of `pos` over `t_range`; derivatives of
    /// the parametrization are taken by finite differences.
    pub fn from_param<F>(pos: F, t_range: (f64, f64), closed: bool, n_samples: usize) -> Result<Self>
    where
        F: Fn(f64) -> [f64; 2],
    {
        Self::build(&pos, None, t_range, closed, n_samples)
    }

    /// Same, with an analytic first derivative d(pos)/dt.
    pub fn from_param_with_deriv<F, G>(
        pos: F,
        dpos: G,
        t_range: (f64, f64),
        closed: bool,
        n_samples: usize,
    ) -> Result<Self>
    where
        F: Fn(f64) -> [f64; 2],
        G: Fn(f64) -> [f64; 2],
    {
        Self::build(&pos, Some(&dpos), t_range, closed, n_samples)
    }

    /// Counterclockwise circle; k = 1/radius with the inward normal.
    pub fn circle(radius: f64, center: [f64; 2]) -> Self {
        Self::from_param_with_deriv(
            |t| [center[0] + radius * t.cos(), center[1] + radius * t.sin()],
            |t| [-radius * t.sin(), radius * t.cos()],
            (0.0, 2.0 * std::f64::consts::PI),
            true,
            64,
        )
        .expect("circle parametrization is non-degenerate")
    }

    /// Straight segment from p0 to p1.
    pub fn line(p0: [f64; 2], p1: [f64; 2]) -> Result<Self> {
        let d = [p1[0] - p0[0], p1[1] - p0[1]];
        Self::from_param_with_deriv(
            move |t| [p0[0] + t * d[0], p0[1] + t * d[1]],
            move |_| d,
            (0.0, 1.0),
            false,
            16,
        )
    }

    fn build(
        pos: &dyn Fn(f64) -> [f64; 2],
        dpos: Option<&dyn Fn(f64) -> [f64; 2]>,
        (t0, t1): (f64, f64),
        closed: bool,
        n_samples: usize,
    ) -> Result<Self> {
        if !(t1 > t0) || n_samples < 16 {
            return Err(Error::Config(
                "curve parameter interval must be nonempty and n_samples >= 16".into(),
            ));
        }
        let range = t1 - t0;
        let h1 = range * 1e-6;
        let h2 = range * 1e-3;
        let d1 = |t: f64| -> [f64; 2] {
            match dpos {
                Some(d) => d(t),
                None => [
                    deriv1(&|t| pos(t)[0], t, h1),
                    deriv1(&|t| pos(t)[1], t, h1),
                ],
            }
        };
        let d2 = |t: f64| -> [f64; 2] {
            match dpos {
                Some(d) => [deriv1(&|t| d(t)[0], t, h1), deriv1(&|t| d(t)[1], t, h1)],
                None => [
                    deriv2(&|t| pos(t)[0], t, h2),
                    deriv2(&|t| pos(t)[1], t, h2),
                ],
            }
        };
        let speed = |t: f64| {
            let v = d1(t);
            v[0].hypot(v[1])
        };

        // Cumulative arc length on coarse panels.
        let mut coarse_t = Vec::with_capacity(n_samples + 1);
        let mut coarse_s = Vec::with_capacity(n_samples + 1);
        coarse_t.push(t0);
        coarse_s.push(0.0);
        for i in 0..n_samples {
            let ta = t0 + range * i as f64 / n_samples as f64;
            let tb = t0 + range * (i + 1) as f64 / n_samples as f64;
            let sp = speed(ta);
            if sp < DEGENERATE_SPEED {
                return Err(Error::DegenerateCurve { t: ta, speed: sp });
            }
            let len = gauss_legendre_16(&speed, ta, tb);
            coarse_t.push(tb);
            coarse_s.push(coarse_s[i] + len);
        }
        let sp_end = speed(t1);
        if sp_end < DEGENERATE_SPEED {
            return Err(Error::DegenerateCurve { t: t1, speed: sp_end });
        }
        let total_length = *coarse_s.last().unwrap();
        if coarse_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::DegenerateCurve { t: t0, speed: 0.0 });
        }

        // Dense uniform-in-s tables; parameter recovered by Newton with the
        // coarse table as warm start.
        let n_fine = ((total_length / 0.005).ceil() as usize).clamp(4096, 40_000);
        let ds = total_length / n_fine as f64;
        let arc_of = |t: f64| -> f64 {
            let i = coarse_t.partition_point(|&tt| tt <= t).saturating_sub(1);
            let i = i.min(n_samples - 1);
            coarse_s[i] + gauss_legendre_16(&speed, coarse_t[i], t)
        };
        let mut pts = Vec::with_capacity(n_fine + 1);
        let mut tans = Vec::with_capacity(n_fine + 1);
        let mut kk = Vec::with_capacity(n_fine + 1);
        let mut t = t0;
        for j in 0..=n_fine {
            let s_target = ds * j as f64;
            for _ in 0..50 {
                let f = arc_of(t) - s_target;
                if f.abs() < 1e-13 * total_length.max(1.0) {
                    break;
                }
                let sp = speed(t);
                let step = (f / sp).clamp(-range / 8.0, range / 8.0);
                t -= step;
                t = t.clamp(t0, t1);
            }
            let v = d1(t);
            let a = d2(t);
            let sp = v[0].hypot(v[1]);
            pts.push(pos(t));
            tans.push([v[0] / sp, v[1] / sp]);
            kk.push((v[0] * a[1] - v[1] * a[0]) / (sp * sp * sp));
        }
        if closed {
            pts[n_fine] = pts[0];
            tans[n_fine] = tans[0];
            kk[n_fine] = kk[0];
        }
        let kd = table_deriv(&kk, ds, closed);
        let kdd = table_deriv(&kd, ds, closed);
        let kd3 = table_deriv(&kdd, ds, closed);
        Ok(PlaneCurve {
            closed,
            total_length,
            ds,
            pts,
            tans,
            k: kk,
            kd,
            kdd,
            kd3,
            coarse_t,
            coarse_s,
        })
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    /// Sampled map parameter -> cumulative arc length (strictly increasing).
    pub fn arc_length_table(&self) -> (&[f64], &[f64]) {
        (&self.coarse_t, &self.coarse_s)
    }

    fn locate(&self, s: f64) -> Result<(usize, f64)> {
        let l = self.total_length;
        let sw = if self.closed {
            s.rem_euclid(l)
        } else {
            if s < -DOMAIN_SLACK * l.max(1.0) || s > l + DOMAIN_SLACK * l.max(1.0) {
                return Err(Error::OutOfDomain { value: s, lo: 0.0, hi: l });
            }
            s.clamp(0.0, l)
        };
        let n = self.pts.len() - 1;
        let j = ((sw / self.ds) as usize).min(n - 1);
        Ok((j, (sw - j as f64 * self.ds) / self.ds))
    }

    pub fn point(&self, s: f64) -> Result<[f64; 2]> {
        let (j, th) = self.locate(s)?;
        let mut p = [0.0; 2];
        for c in 0..2 {
            p[c] = hermite(
                self.pts[j][c],
                self.pts[j + 1][c],
                self.tans[j][c],
                self.tans[j + 1][c],
                self.ds,
                th,
            );
        }
        Ok(p)
    }

    /// Unit tangent q_M'(s).
    pub fn tangent(&self, s: f64) -> Result<[f64; 2]> {
        let (j, th) = self.locate(s)?;
        // T' = k n with n = rot90(T)
        let mut v = [0.0; 2];
        for c in 0..2 {
            let m0 = self.k[j] * rot90(self.tans[j])[c];
            let m1 = self.k[j + 1] * rot90(self.tans[j + 1])[c];
            v[c] = hermite(self.tans[j][c], self.tans[j + 1][c], m0, m1, self.ds, th);
        }
        let n = v[0].hypot(v[1]);
        Ok([v[0] / n, v[1] / n])
    }

    /// Unit normal: tangent rotated by +pi/2.
    pub fn normal(&self, s: f64) -> Result<[f64; 2]> {
        Ok(rot90(self.tangent(s)?))
    }

    /// Signed curvature, sign fixed by q_M''(s) = k(s) n(s).
    pub fn curvature(&self, s: f64) -> Result<f64> {
        let (j, th) = self.locate(s)?;
        Ok(hermite(self.k[j], self.k[j + 1], self.kd[j], self.kd[j + 1], self.ds, th))
    }

    /// (k, dk/ds, d^2k/ds^2) at s.
    pub fn curvature_derivs(&self, s: f64) -> Result<(f64, f64, f64)> {
        let (j, th) = self.locate(s)?;
        let k = hermite(self.k[j], self.k[j + 1], self.kd[j], self.kd[j + 1], self.ds, th);
        let kd = hermite(self.kd[j], self.kd[j + 1], self.kdd[j], self.kdd[j + 1], self.ds, th);
        let kdd = hermite(self.kdd[j], self.kdd[j + 1], self.kd3[j], self.kd3[j + 1], self.ds, th);
        Ok((k, kd, kdd))
    }

    /// Largest |k| over the stored samples.
    pub fn max_abs_curvature(&self) -> f64 {
        self.k.iter().fold(0.0, |m, &x| m.max(x.abs()))
    }

    /// Sample stride of the internal table, for coarse closest-point scans.
    pub(crate) fn sample_stride(&self) -> f64 {
        self.ds
    }

    pub(crate) fn sample_points(&self) -> &[[f64; 2]] {
        &self.pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn circle_radius_two_length() {
        let c = PlaneCurve::circle(2.0, [0.0, 0.0]);
        assert_abs_diff_eq!(c.total_length(), 4.0 * std::f64::consts::PI, epsilon = 1e-10);
    }

    #[test]
    fn straight_segment_identity() {
        let c = PlaneCurve::line([0.0, 0.0], [3.0, 0.0]).unwrap();
        assert_abs_diff_eq!(c.total_length(), 3.0, epsilon = 1e-12);
        let p = c.point(1.7).unwrap();
        assert_abs_diff_eq!(p[0], 1.7, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.curvature(1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ellipse_length_against_quadrature_oracle() {
        let (a, b) = (2.0, 1.0);
        let c = PlaneCurve::from_param(
            |t| [a * t.cos(), b * t.sin()],
            (0.0, 2.0 * std::f64::consts::PI),
            true,
            256,
        )
        .unwrap();
        // independent oracle: adaptive-ish composite Simpson of |q'| at high n
        let f = |t: f64| ((a * t.sin()).powi(2) + (b * t.cos()).powi(2)).sqrt();
        let n = 20_000;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let mut s = f(0.0) + f(2.0 * std::f64::consts::PI);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        assert_abs_diff_eq!(c.total_length(), oracle, epsilon = 1e-8);
    }

    #[test]
    fn circle_curvature_and_normal_convention() {
        let r = 2.5;
        let c = PlaneCurve::circle(r, [1.0, -1.0]);
        for s in [0.0, 1.0, 3.7, c.total_length() * 0.9] {
            assert_abs_diff_eq!(c.curvature(s).unwrap(), 1.0 / r, epsilon = 1e-9);
            // inward normal points to the center
            let p = c.point(s).unwrap();
            let n = c.normal(s).unwrap();
            assert_abs_diff_eq!(p[0] + r * n[0], 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(p[1] + r * n[1], -1.0, epsilon = 1e-8);
        }
        let (_, kd, kdd) = c.curvature_derivs(1.3).unwrap();
        assert_abs_diff_eq!(kd, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(kdd, 0.0, epsilon = 1e-6);
    }

    #[test]
    fn parabola_vertex_curvature() {
        // y = x^2/2: |k| at the vertex is |x'y'' - y'x''|/|q'|^3 = 1
        let c = PlaneCurve::from_param(|t| [t, 0.5 * t * t], (-2.0, 2.0), false, 64).unwrap();
        let s_vertex = {
            // vertex is at half the symmetric arc length
            c.total_length() / 2.0
        };
        assert_abs_diff_eq!(c.curvature(s_vertex).unwrap().abs(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn unit_tangent_everywhere() {
        let c = PlaneCurve::from_param(
            |t| [t + 0.3 * (2.0 * t).sin(), 0.5 * t.cos()],
            (0.0, 4.0),
            false,
            128,
        )
        .unwrap();
        let mut s = 0.0;
        while s <= c.total_length() {
            let t = c.tangent(s).unwrap();
            assert_abs_diff_eq!(t[0].hypot(t[1]), 1.0, epsilon = 1e-12);
            // tangent matches FD of point to interpolation accuracy
            if s > 0.01 && s < c.total_length() - 0.01 {
                let h = 1e-4;
                let pp = c.point(s + h).unwrap();
                let pm = c.point(s - h).unwrap();
                assert_abs_diff_eq!((pp[0] - pm[0]) / (2.0 * h), t[0], epsilon = 1e-6);
                assert_abs_diff_eq!((pp[1] - pm[1]) / (2.0 * h), t[1], epsilon = 1e-6);
            }
            s += 0.37;
        }
    }

    #[test]
    fn degenerate_tangent_rejected() {
        let r = PlaneCurve::from_param(|t| [t * t, 0.0], (0.0, 1.0), false, 16);
        assert!(matches!(r, Err(Error::DegenerateCurve { .. })));
    }

    #[test]
    fn curvature_derivs_on_analytic_curve() {
        // curve with curvature varying in s; compare kd against FD of curvature
        let c = PlaneCurve::from_param(|t| [t, 0.2 * (1.5 * t).sin()], (-3.0, 3.0), false, 128)
            .unwrap();
        for s in [1.0, 2.0, 3.5, 4.8] {
            let (_, kd, kdd) = c.curvature_derivs(s).unwrap();
            let h = 1e-3;
            let kp = c.curvature(s + h).unwrap();
            let km = c.curvature(s - h).unwrap();
            let k0 = c.curvature(s).unwrap();
            assert_abs_diff_eq!(kd, (kp - km) / (2.0 * h), epsilon = 1e-6);
            assert_abs_diff_eq!(kdd, (kp - 2.0 * k0 + km) / (h * h), epsilon = 1e-4);
        }
    }
}
