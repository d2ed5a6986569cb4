use nalgebra::DMatrix;

/// Relative finite-difference step for default derivatives.
const FD_H: f64 = 1e-4;

fn step(x: f64) -> f64 {
    FD_H * (1.0 + x.abs())
}

/// Effective potential on the base manifold, with derivatives. Implementors
/// with closed-form derivatives should override `gradient` and `hessian`;
/// the defaults are 4th-order central differences.
pub trait Potential: Sync {
    fn dim(&self) -> usize;
    fn value(&self, a: &[f64]) -> f64;

    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        let mut p = a.to_vec();
        for i in 0..self.dim() {
            let h = step(a[i]);
            let mut f = |x: f64| {
                p[i] = x;
                let v = self.value(&p);
                p[i] = a[i];
                v
            };
            g[i] = (f(a[i] - 2.0 * h) - 8.0 * f(a[i] - h) + 8.0 * f(a[i] + h) - f(a[i] + 2.0 * h))
                / (12.0 * h);
        }
        g
    }

    fn hessian(&self, a: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut p = a.to_vec();
        for j in 0..n {
            let h = step(a[j]);
            let mut col = |x: f64| {
                p[j] = x;
                let g = self.gradient(&p);
                p[j] = a[j];
                g
            };
            let gm2 = col(a[j] - 2.0 * h);
            let gm1 = col(a[j] - h);
            let gp1 = col(a[j] + h);
            let gp2 = col(a[j] + 2.0 * h);
            for i in 0..n {
                m[(i, j)] = (gm2[i] - 8.0 * gm1[i] + 8.0 * gp1[i] - gp2[i]) / (12.0 * h);
            }
        }
        // symmetrize the FD noise away
        for i in 0..n {
            for j in 0..i {
                let s = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = s;
                m[(j, i)] = s;
            }
        }
        m
    }

    /// Declared working domain; integration stops with a domain-exit error
    /// when a trajectory leaves it.
    fn contains(&self, _a: &[f64]) -> bool {
        true
    }
}

/// Potential built from closures, with optional analytic derivatives.
pub struct FnPotential {
    dim: usize,
    value: Box<dyn Fn(&[f64]) -> f64 + Sync + Send>,
    gradient: Option<Box<dyn Fn(&[f64]) -> Vec<f64> + Sync + Send>>,
    hessian: Option<Box<dyn Fn(&[f64]) -> DMatrix<f64> + Sync + Send>>,
    domain: Option<Box<dyn Fn(&[f64]) -> bool + Sync + Send>>,
}

impl FnPotential {
    pub fn new(dim: usize, value: impl Fn(&[f64]) -> f64 + Sync + Send + 'static) -> Self {
        Self { dim, value: Box::new(value), gradient: None, hessian: None, domain: None }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> Vec<f64> + Sync + Send + 'static,
    ) -> Self {
        self.gradient = Some(Box::new(gradient));
        self
    }

    pub fn with_hessian(
        mut self,
        hessian: impl Fn(&[f64]) -> DMatrix<f64> + Sync + Send + 'static,
    ) -> Self {
        self.hessian = Some(Box::new(hessian));
        self
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Sync + Send + 'static) -> Self {
        self.domain = Some(Box::new(domain));
        self
    }
}

impl Potential for FnPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, a: &[f64]) -> f64 {
        (self.value)(a)
    }

    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(a),
            None => default_gradient(self, a),
        }
    }

    fn hessian(&self, a: &[f64]) -> DMatrix<f64> {
        match &self.hessian {
            Some(h) => h(a),
            None => default_hessian(self, a),
        }
    }

    fn contains(&self, a: &[f64]) -> bool {
        self.domain.as_ref().map_or(true, |d| d(a))
    }
}

// Free copies of the trait defaults so overriding implementations can still
// fall back to them.
fn default_gradient(p: &dyn Potential, a: &[f64]) -> Vec<f64> {
    struct Shim<'a>(&'a dyn Potential);
    impl Potential for Shim<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn value(&self, a: &[f64]) -> f64 {
            self.0.value(a)
        }
    }
    Shim(p).gradient(a)
}

fn default_hessian(p: &dyn Potential, a: &[f64]) -> DMatrix<f64> {
    struct Shim<'a>(&'a dyn Potential);
    impl Potential for Shim<'_> {
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn value(&self, a: &[f64]) -> f64 {
            self.0.value(a)
        }
        fn gradient(&self, a: &[f64]) -> Vec<f64> {
            self.0.gradient(a)
        }
    }
    Shim(p).hessian(a)
}

/// Riemannian metric on the base, with the derived quantities the
/// integrators need. Defaults differentiate the metric numerically.
pub trait Metric: Sync {
    fn dim(&self) -> usize;
    fn metric(&self, a: &[f64]) -> DMatrix<f64>;

    fn inverse_metric(&self, a: &[f64]) -> Option<DMatrix<f64>> {
        self.metric(a).try_inverse()
    }

    /// Christoffel symbols of the Levi-Civita connection; `result[i][(j,k)]`
    /// holds Gamma^i_{jk}.
    fn christoffel(&self, a: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.dim();
        let inv = self.inverse_metric(a)?;
        // dg[l][(j,k)] = d_l g_{jk}, 4th-order central
        let mut p = a.to_vec();
        let mut dg = Vec::with_capacity(n);
        for l in 0..n {
            let h = step(a[l]);
            let mut at = |x: f64| {
                p[l] = x;
                let g = self.metric(&p);
                p[l] = a[l];
                g
            };
            let m = (at(a[l] - 2.0 * h) - at(a[l] - h) * 8.0 + at(a[l] + h) * 8.0
                - at(a[l] + 2.0 * h))
                / (12.0 * h);
            dg.push(m);
        }
        let mut gamma = vec![DMatrix::zeros(n, n); n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += inv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    }
                    gamma[i][(j, k)] = 0.5 * s;
                }
            }
        }
        Some(gamma)
    }

    /// True when the metric is identically the identity; lets the dispersion
    /// flow skip metric-derivative terms and enables the flat condition check.
    fn is_flat(&self) -> bool {
        false
    }
}

/// The identity metric.
pub struct FlatMetric(pub usize);

impl Metric for FlatMetric {
    fn dim(&self) -> usize {
        self.0
    }

    fn metric(&self, _a: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.0, self.0)
    }

    fn inverse_metric(&self, _a: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.0, self.0))
    }

    fn christoffel(&self, _a: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        Some(vec![DMatrix::zeros(self.0, self.0); self.0])
    }

    fn is_flat(&self) -> bool {
        true
    }
}

/// Metric built from a closure.
pub struct FnMetric {
    dim: usize,
    metric: Box<dyn Fn(&[f64]) -> DMatrix<f64> + Sync + Send>,
}

impl FnMetric {
    pub fn new(dim: usize, metric: impl Fn(&[f64]) -> DMatrix<f64> + Sync + Send + 'static) -> Self {
        Self { dim, metric: Box::new(metric) }
    }
}

impl Metric for FnMetric {
    fn dim(&self) -> usize {
        self.dim
    }

    fn metric(&self, a: &[f64]) -> DMatrix<f64> {
        (self.metric)(a)
    }
}
