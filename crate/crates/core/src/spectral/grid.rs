use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Smallest supported number of collocation points.
pub const MIN_POINTS: usize = 8;

/// Chebyshev–Gauss–Lobatto collocation grid on `[-1, 1]`.
///
/// Points are stored in descending order: index `0` is the top wall `y = +1`
/// and index `n - 1` is the bottom wall `y = -1`.
#[derive(Debug, Clone)]
pub struct ChebGrid {
    n: usize,
    points: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    quad: Vec<f64>,
    bary: Vec<f64>,
}

/// Builds a shared grid with `n` points.
pub fn build_grid(n: usize) -> Result<Arc<ChebGrid>> {
    ChebGrid::new(n).map(Arc::new)
}

impl ChebGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::Config(format!(
                "grid needs at least {MIN_POINTS} points, got {n}"
            )));
        }
        let big_n = (n - 1) as f64;
        // sine form keeps the nodes exactly antisymmetric
        let points: Vec<f64> = (0..n)
            .map(|k| (PI * (big_n - 2.0 * k as f64) / (2.0 * big_n)).sin())
            .collect();

        let c = |i: usize| if i == 0 || i == n - 1 { 2.0 } else { 1.0 };
        let sign = |i: usize| if i.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut d1 = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                // x_i - x_j via the product-of-sines identity for accuracy
                let diff = 2.0
                    * ((i + j) as f64 * PI / (2.0 * big_n)).sin()
                    * ((j as f64 - i as f64) * PI / (2.0 * big_n)).sin();
                d1[(i, j)] = c(i) / c(j) * sign(i + j) / diff;
            }
        }
        for i in 0..n {
            let off: f64 = (0..n).filter(|&j| j != i).map(|j| d1[(i, j)]).sum();
            d1[(i, i)] = -off;
        }
        let d2 = &d1 * &d1;

        let bary = (0..n)
            .map(|k| {
                let w = sign(k);
                if k == 0 || k == n - 1 {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect();

        Ok(ChebGrid {
            n,
            points,
            d1,
            d2,
            quad: clenshaw_curtis(n),
            bary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    /// Clenshaw–Curtis quadrature weights matching `points`.
    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad
    }

    pub const TOP: usize = 0;

    pub fn bottom(&self) -> usize {
        self.n - 1
    }

    pub fn differentiate(&self, values: &[f64]) -> Vec<f64> {
        mat_vec(&self.d1, values)
    }

    pub fn differentiate2(&self, values: &[f64]) -> Vec<f64> {
        mat_vec(&self.d2, values)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.quad.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Barycentric evaluation of the interpolant through `values` at `y`.
    pub fn interpolate(&self, values: &[f64], y: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&x, &w), &v) in self.points.iter().zip(&self.bary).zip(values) {
            let d = y - x;
            if d == 0.0 {
                return v;
            }
            let t = w / d;
            num += t * v;
            den += t;
        }
        num / den
    }

    /// Samples of the interpolant on another grid.
    pub fn resample(&self, values: &[f64], target: &ChebGrid) -> Vec<f64> {
        if target.n == self.n {
            return values.to_vec();
        }
        target
            .points
            .iter()
            .map(|&y| self.interpolate(values, y))
            .collect()
    }

    pub fn same_as(&self, other: &ChebGrid) -> bool {
        self.n == other.n
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    let out = m * DVector::from_column_slice(v);
    out.as_slice().to_vec()
}

fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let big_n = n - 1;
    let nf = big_n as f64;
    let theta: Vec<f64> = (0..n).map(|k| PI * k as f64 / nf).collect();
    let mut w = vec![0.0; n];
    let mut v = vec![1.0; n];
    if big_n.is_multiple_of(2) {
        w[0] = 1.0 / (nf * nf - 1.0);
        for k in 1..big_n / 2 {
            let kf = k as f64;
            for i in 1..big_n {
                v[i] -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for i in 1..big_n {
            v[i] -= (nf * theta[i]).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        for k in 1..=(big_n - 1) / 2 {
            let kf = k as f64;
            for i in 1..big_n {
                v[i] -= 2.0 * (2.0 * kf * theta[i]).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    w[big_n] = w[0];
    for i in 1..big_n {
        w[i] = 2.0 * v[i] / nf;
    }
    w
}
