//! General embeddings M^n in R^{n+m}: induced metric, second and normal
//! fundamental forms, and Christoffel symbols, all from a chart closure and
//! an orthonormal normal frame by 4th-order finite differences.

use crate::error::{Error, Result};
use crate::numerics::deriv1;
use nalgebra::DMatrix;

pub struct EmbeddingSpec {
    pub dim_base: usize,
    pub codim: usize,
    /// x (dim_base) -> ambient point (dim_base + codim)
    pub chart: Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    /// x -> codim orthonormal ambient vectors, each orthogonal to the tangents
    pub normal_frame: Box<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>,
}

#[derive(Clone, Debug)]
pub struct EmbeddingQuantities {
    /// induced metric G_M, n x n
    pub metric: DMatrix<f64>,
    /// second fundamental form: alpha[k][(l, j)] = n_k . d_l t_j
    pub alpha: Vec<DMatrix<f64>>,
    /// normal fundamental form: beta[i][(k, h)] = n_k . d_i n_h, antisymmetric
    pub beta: Vec<DMatrix<f64>>,
    /// Christoffel symbols: gamma[i][(j, k)] = Gamma^i_{jk}
    pub gamma: Vec<DMatrix<f64>>,
}

const FRAME_TOL: f64 = 1e-8;
const FD_H: f64 = 1e-3;

fn component_deriv(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], dir: usize, comp: usize) -> f64 {
    let g = |t: f64| {
        let mut y = x.to_vec();
        y[dir] = t;
        f(&y)[comp]
    };
    deriv1(&g, x[dir], FD_H)
}

fn tangents(spec: &EmbeddingSpec, x: &[f64]) -> Vec<Vec<f64>> {
    let dim = spec.dim_base + spec.codim;
    (0..spec.dim_base)
        .map(|j| {
            (0..dim)
                .map(|c| component_deriv(&*spec.chart, x, j, c))
                .collect()
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn metric_at(spec: &EmbeddingSpec, x: &[f64]) -> DMatrix<f64> {
    let t = tangents(spec, x);
    let n = spec.dim_base;
    DMatrix::from_fn(n, n, |i, j| dot(&t[i], &t[j]))
}

pub fn embedding_quantities(spec: &EmbeddingSpec, x: &[f64]) -> Result<EmbeddingQuantities> {
    let n = spec.dim_base;
    let m = spec.codim;
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "base point has {} coordinates, embedding expects {}",
            x.len(),
            n
        )));
    }
    let t = tangents(spec, x);
    let frame = (spec.normal_frame)(x);
    if frame.len() != m || frame.iter().any(|v| v.len() != n + m) {
        return Err(Error::DimensionMismatch("normal frame shape".into()));
    }

    // frame orthonormality and orthogonality to tangents
    let mut residual = 0.0f64;
    for k in 0..m {
        for h in 0..m {
            let target = if k == h { 1.0 } else { 0.0 };
            residual = residual.max((dot(&frame[k], &frame[h]) - target).abs());
        }
        for tj in &t {
            let tn = dot(tj, tj).sqrt();
            residual = residual.max(dot(&frame[k], tj).abs() / tn.max(1e-300));
        }
    }
    if residual > FRAME_TOL {
        return Err(Error::Frame { residual });
    }

    let metric = metric_at(spec, x);
    let chol = metric.clone().cholesky();
    if chol.is_none() {
        return Err(Error::DegenerateEmbedding);
    }

    // alpha^k_{lj} = n_k . d_l t_j = n_k . d^2_{lj} zeta
    let ambient = n + m;
    let alpha = (0..m)
        .map(|k| {
            DMatrix::from_fn(n, n, |l, j| {
                (0..ambient)
                    .map(|c| {
                        let g = |tv: f64| {
                            let mut y = x.to_vec();
                            y[l] = tv;
                            component_deriv(&*spec.chart, &y, j, c)
                        };
                        frame[k][c] * deriv1(&g, x[l], FD_H)
                    })
                    .sum()
            })
        })
        .collect::<Vec<_>>();

    // beta^{kh}_i = n_k . d_i n_h; antisymmetrized in (k, h), which is exact
    // for an orthonormal frame and kills FD noise (so codim 1 gives 0).
    let beta = (0..n)
        .map(|i| {
            let raw = DMatrix::from_fn(m, m, |k, h| {
                (0..ambient)
                    .map(|c| {
                        let g = |tv: f64| {
                            let mut y = x.to_vec();
                            y[i] = tv;
                            (spec.normal_frame)(&y)[h][c]
                        };
                        frame[k][c] * deriv1(&g, x[i], FD_H)
                    })
                    .sum::<f64>()
            });
            (&raw - raw.transpose()) * 0.5
        })
        .collect::<Vec<_>>();

    // Gamma^i_{jk} = (1/2) G^{il} (d_j G_{lk} + d_k G_{lj} - d_l G_{jk})
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|d| {
            DMatrix::from_fn(n, n, |a, b| {
                let g = |tv: f64| {
                    let mut y = x.to_vec();
                    y[d] = tv;
                    metric_at(spec, &y)[(a, b)]
                };
                deriv1(&g, x[d], FD_H)
            })
        })
        .collect();
    let ginv = chol.unwrap().inverse();
    let gamma = (0..n)
        .map(|i| {
            DMatrix::from_fn(n, n, |j, k| {
                (0..n)
                    .map(|l| {
                        0.5 * ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)])
                    })
                    .sum()
            })
        })
        .collect();

    Ok(EmbeddingQuantities { metric, alpha, beta, gamma })
}
