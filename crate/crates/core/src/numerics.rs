//! Small numerical utilities shared by the physics modules: quadrature,
//! finite differences, a symmetric tridiagonal eigensolver, smoothstep
//! windows, log-log slope fits and harmonic-oscillator eigenfunctions.

use crate::error::{Error, Result};

/// Quintic smoothstep: 0 for t <= 0, 1 for t >= 1, C^2 in between.
pub fn smoothstep5(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

/// Window that is 1 on [inner_lo, inner_hi], 0 outside [outer_lo, outer_hi],
/// and a quintic smoothstep on the two transition bands.
pub fn smooth_window(x: f64, outer_lo: f64, inner_lo: f64, inner_hi: f64, outer_hi: f64) -> f64 {
    debug_assert!(outer_lo <= inner_lo && inner_lo <= inner_hi && inner_hi <= outer_hi);
    if x <= inner_lo {
        smoothstep5((x - outer_lo) / (inner_lo - outer_lo))
    } else if x >= inner_hi {
        smoothstep5((outer_hi - x) / (outer_hi - inner_hi))
    } else {
        1.0
    }
}

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
const GL16_X: [f64; 8] = [
    0.09501250983763744,
    0.2816035507792589,
    0.45801677765722739,
    0.61787624440264375,
    0.75540440835500303,
    0.86563120238783174,
    0.94457502307323258,
    0.98940093499164993,
];
const GL16_W: [f64; 8] = [
    0.189450610455068496,
    0.182603415044923589,
    0.169156519395002532,
    0.149595988816576732,
    0.124628971255533872,
    0.095158511682492785,
    0.062253523938647893,
    0.027152459411754095,
];

/// 16-point Gauss-Legendre quadrature of `f` on [a, b].
pub fn gauss_legendre_16(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for i in 0..8 {
        sum += GL16_W[i] * (f(mid + half * GL16_X[i]) + f(mid - half * GL16_X[i]));
    }
    sum * half
}

/// Composite Gauss-Legendre quadrature over `n` subintervals.
pub fn composite_gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n)
        .map(|i| gauss_legendre_16(f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Fourth-order central first derivative.
pub fn deriv1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
}

/// Fourth-order central second derivative.
pub fn deriv2(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Least-squares fit of log(y) = slope * log(x) + intercept.
/// Returns (slope, intercept, rms residual of the fit in log space).
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points for a slope fit");
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag d,
/// off-diagonal e) strictly below `lambda`, by Sturm sequence count.
fn sturm_count(d: &[f64], e: &[f64], lambda: f64) -> usize {
    let n = d.len();
    let mut count = 0;
    let mut q = d[0] - lambda;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let denom = if q.abs() < 1e-300 { 1e-300_f64.copysign(q) } else { q };
        q = d[i] - lambda - e[i - 1] * e[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `count` eigenvalues of a symmetric tridiagonal matrix by bisection.
pub fn tridiag_lowest_eigenvalues(d: &[f64], e: &[f64], count: usize) -> Vec<f64> {
    let n = d.len();
    assert!(count <= n);
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i < n - 1 { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let (mut a, mut b) = (lo, hi);
        while b - a > 1e-14 * (1.0 + a.abs().max(b.abs())) {
            let m = 0.5 * (a + b);
            if sturm_count(d, e, m) > k {
                b = m;
            } else {
                a = m;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Eigenvector of the tridiagonal matrix for an isolated eigenvalue, by
/// inverse iteration with partial pivoting. Returned with unit Euclidean norm.
pub fn tridiag_eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = d.len();
    // Deterministic, sign-varying start vector.
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i as f64 * 0.7357) + 0.2).sin() + 0.5)
        .collect();
    normalize(&mut v);
    let shift = lambda + 1e-12 * (1.0 + lambda.abs());
    for _ in 0..4 {
        v = solve_tridiag_shifted(d, e, shift, &v)?;
        normalize(&mut v);
    }
    Ok(v)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

/// Solve (T - shift I) x = b for tridiagonal T via Gaussian elimination with
/// partial pivoting (row swaps between adjacent rows only).
///
/// Row i is kept as (entry at col i, col i+1) in `rows[i]` plus a fill-in
/// entry at col i+2 in `fill[i]`; `below[i]` is the col-i entry of row i+1.
fn solve_tridiag_shifted(d: &[f64], e: &[f64], shift: f64, b: &[f64]) -> Result<Vec<f64>> {
    let n = d.len();
    let mut rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let hi = if i < n - 1 { e[i] } else { 0.0 };
            [d[i] - shift, hi]
        })
        .collect();
    let mut below: Vec<f64> = (0..n).map(|i| if i < n - 1 { e[i] } else { 0.0 }).collect();
    let mut fill = vec![0.0; n];
    let mut rhs = b.to_vec();
    for i in 0..n - 1 {
        if below[i].abs() > rows[i][0].abs() {
            // Swap rows i and i+1. Row i+1 currently is
            // (below[i], rows[i+1][0], rows[i+1][1]) on columns i, i+1, i+2;
            // row i is (rows[i][0], rows[i][1], 0).
            let old_i = rows[i];
            rows[i] = [below[i], rows[i + 1][0]];
            fill[i] = rows[i + 1][1];
            rows[i + 1] = [old_i[1], 0.0];
            below[i] = old_i[0];
            rhs.swap(i, i + 1);
        }
        let pivot = rows[i][0];
        if pivot.abs() < 1e-300 {
            return Err(Error::Eigensolver("singular pivot in inverse iteration".into()));
        }
        let factor = below[i] / pivot;
        rows[i + 1][0] -= factor * rows[i][1];
        rows[i + 1][1] -= factor * fill[i];
        let r = rhs[i];
        rhs[i + 1] -= factor * r;
    }
    // Back substitution: row i has (diag, sup, sup2) = rows[i][0], rows[i][1], fill[i].
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= rows[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= fill[i] * x[i + 2];
        }
        let pivot = rows[i][0];
        if pivot.abs() < 1e-300 {
            return Err(Error::Eigensolver("singular pivot in back substitution".into()));
        }
        x[i] = s / pivot;
    }
    Ok(x)
}

/// Harmonic-oscillator eigenfunctions of -(1/2) d^2/du^2 + (1/2) beta^2 u^2
/// (unit mass, unit "hbar"), i.e. psi_n with energies (n + 1/2) beta.
/// Returns psi_0..psi_{n_max} evaluated at `u`.
pub fn oscillator_eigenfunctions(n_max: usize, beta: f64, u: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = (beta / std::f64::consts::PI).powf(0.25) * (-0.5 * beta * u * u).exp();
    out.push(psi0);
    if n_max == 0 {
        return out;
    }
    let su = beta.sqrt() * u;
    out.push((2.0_f64).sqrt() * su * psi0);
    for n in 1..n_max {
        let next = (2.0 / (n as f64 + 1.0)).sqrt() * su * out[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Trapezoid rule on uniformly spaced samples (spectrally accurate for
/// smooth functions decaying below roundoff at both ends).
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    h * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn smoothstep_endpoints_and_monotone() {
        assert_eq!(smoothstep5(-1.0), 0.0);
        assert_eq!(smoothstep5(2.0), 1.0);
        assert_abs_diff_eq!(smoothstep5(0.5), 0.5, epsilon = 1e-12);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = smoothstep5(i as f64 / 100.0);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn gl16_integrates_polynomials_exactly() {
        let val = gauss_legendre_16(&|x| x.powi(7) - 3.0 * x.powi(2) + 1.0, -1.0, 2.0);
        // antiderivative x^8/8 - x^3 + x
        let exact = (256.0 / 8.0 - 8.0 + 2.0) - (1.0 / 8.0 + 1.0 - 1.0);
        assert_abs_diff_eq!(val, exact, epsilon = 1e-12);
    }

    #[test]
    fn loglog_fit_recovers_power_law() {
        let xs = [0.08, 0.04, 0.02, 0.01];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * f64::powf(*x, 1.5)).collect();
        let (slope, _, resid) = fit_loglog(&xs, &ys);
        assert_abs_diff_eq!(slope, 1.5, epsilon = 1e-10);
        assert!(resid < 1e-12);
    }

    #[test]
    fn tridiag_harmonic_oscillator_levels() {
        // -(1/2) psi'' + (1/2) u^2 psi on [-10, 10]
        let n = 2000;
        let h = 20.0 / (n as f64 + 1.0);
        let d: Vec<f64> = (1..=n)
            .map(|i| {
                let u = -10.0 + i as f64 * h;
                1.0 / (h * h) + 0.5 * u * u
            })
            .collect();
        let e = vec![-0.5 / (h * h); n - 1];
        let evs = tridiag_lowest_eigenvalues(&d, &e, 3);
        for (k, ev) in evs.iter().enumerate() {
            assert_abs_diff_eq!(*ev, k as f64 + 0.5, epsilon = 2e-4);
        }
        let v = tridiag_eigenvector(&d, &e, evs[0]).unwrap();
        // residual check
        let mut res = 0.0_f64;
        for i in 0..n {
            let mut r = (d[i] - evs[0]) * v[i];
            if i > 0 {
                r += e[i - 1] * v[i - 1];
            }
            if i < n - 1 {
                r += e[i] * v[i + 1];
            }
            res = res.max(r.abs());
        }
        assert!(res < 1e-8, "inverse iteration residual {res}");
    }

    #[test]
    fn oscillator_eigenfunctions_orthonormal() {
        let beta = 1.7;
        let n = 4001;
        let h = 24.0 / (n as f64 - 1.0);
        let mut gram = [[0.0_f64; 4]; 4];
        for i in 0..n {
            let u = -12.0 + i as f64 * h;
            let psi = oscillator_eigenfunctions(3, beta, u);
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            for a in 0..4 {
                for b in 0..4 {
                    gram[a][b] += w * h * psi[a] * psi[b];
                }
            }
        }
        for a in 0..4 {
            for b in 0..4 {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[a][b], expect, epsilon = 1e-10);
            }
        }
    }
}
