use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::model::{squared_norm, Point, ProblemConstants};
use crate::rng::RngStream;

use super::{Dataset, Objective};

const POWER_ITER_TOL: f64 = 1e-6;
const OPT_GRAD_TOL: f64 = 1e-10;
const OPT_MAX_ITERS: usize = 10_000_000;

/// L2-regularized logistic regression
/// `F(x) = (1/M) Σ_j [ln(1 + exp(xᵀA_j)) − 1{b_j = 1} xᵀA_j] + (λ/2)‖x‖²`.
///
/// `μ = λ` and `L = λ + λ_max(AᵀA / 4M)`. The reference optimum is found
/// once at construction by full-gradient descent with step `1/L` until
/// `‖∇F‖ <= 1e-10`. Stochastic gradients average `batch` rows drawn
/// uniformly with replacement; `sigma2` records the exact mini-batch
/// gradient variance at the optimum (`c` is left at 0).
#[derive(Debug, Clone)]
pub struct LogisticL2 {
    data: Arc<Dataset>,
    lambda: f64,
    batch: usize,
    constants: ProblemConstants,
}

impl LogisticL2 {
    pub fn new(data: Arc<Dataset>, lambda: f64, batch: usize) -> Result<Self> {
        if data.is_empty() || data.dim() == 0 {
            return Err(invalid("logistic objective needs a non-empty dataset"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be > 0, got {lambda}")));
        }
        if batch == 0 {
            return Err(invalid("batch size must be >= 1"));
        }
        let data_smoothness = 0.25 * top_eigenvalue_gram(&data)? / data.len() as f64;
        let smoothness = lambda + data_smoothness;

        let mut this = Self {
            data,
            lambda,
            batch,
            constants: ProblemConstants::new(lambda, smoothness, 0.0, 0.0, 0.0, Point::zeros(1))?,
        };
        let x_star = this.solve_reference_optimum()?;
        let f_star = this.value_at(&x_star);
        let sigma2 = this.per_row_gradient_variance(&x_star) / batch as f64;
        this.constants = ProblemConstants::new(
            lambda,
            smoothness,
            0.0,
            sigma2,
            f_star,
            Point::from_vec_unchecked(x_star),
        )?;
        Ok(this)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn dataset(&self) -> &Dataset {
        &self.data
    }

    /// Adds `(σ(xᵀA_j) − 1{b_j=1}) · scale · A_j` to `out`.
    fn add_row_gradient(&self, j: usize, x: &[f64], scale: f64, out: &mut [f64]) {
        let a = self.data.row_dot(j, x);
        let r = sigmoid(a) - f64::from(self.data.labels()[j]);
        self.data.add_row_scaled(j, r * scale, out);
    }

    fn solve_reference_optimum(&self) -> Result<Vec<f64>> {
        let d = self.data.dim();
        let step = 1.0 / self.constants.smoothness;
        let mut x = vec![0.0; d];
        let mut g = vec![0.0; d];
        for _ in 0..OPT_MAX_ITERS {
            self.gradient_into(&x, &mut g);
            if squared_norm(&g).sqrt() <= OPT_GRAD_TOL {
                return Ok(x);
            }
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi -= step * gi;
            }
        }
        Err(Error::NoConvergence(format!(
            "logistic reference optimum: gradient norm still above {OPT_GRAD_TOL} after {OPT_MAX_ITERS} steps"
        )))
    }

    fn per_row_gradient_variance(&self, x: &[f64]) -> f64 {
        // the regularizer is deterministic; only the data term varies
        let d = self.data.dim();
        let m = self.data.len();
        let mut mean = vec![0.0; d];
        for j in 0..m {
            self.add_row_gradient(j, x, 1.0 / m as f64, &mut mean);
        }
        let mut acc = 0.0;
        let mut gj = vec![0.0; d];
        for j in 0..m {
            gj.iter_mut().for_each(|v| *v = 0.0);
            self.add_row_gradient(j, x, 1.0, &mut gj);
            acc += gj
                .iter()
                .zip(&mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>();
        }
        acc / m as f64
    }
}

impl Objective for LogisticL2 {
    fn name(&self) -> &str {
        "logistic"
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        let m = self.data.len();
        let loss: f64 = (0..m)
            .map(|j| {
                let a = self.data.row_dot(j, x);
                softplus(a) - f64::from(self.data.labels()[j]) * a
            })
            .sum();
        loss / m as f64 + 0.5 * self.lambda * squared_norm(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let m = self.data.len();
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.lambda * xi;
        }
        let scale = 1.0 / m as f64;
        for j in 0..m {
            self.add_row_gradient(j, x, scale, out);
        }
    }

    fn stochastic_gradient_into(&self, x: &[f64], stream: &RngStream, out: &mut [f64]) {
        let s = stream.sampler();
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.lambda * xi;
        }
        let scale = 1.0 / self.batch as f64;
        for k in 0..self.batch {
            let j = s.index(k as u64, self.data.len());
            self.add_row_gradient(j, x, scale, out);
        }
    }
}

fn sigmoid(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^a)` without overflow.
fn softplus(a: f64) -> f64 {
    if a > 0.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

/// Largest eigenvalue of `AᵀA` by power iteration, relative tolerance 1e-6.
fn top_eigenvalue_gram(data: &Dataset) -> Result<f64> {
    let d = data.dim();
    let m = data.len();
    let mut v = vec![1.0 / (d as f64).sqrt(); d];
    let mut w = vec![0.0; d];
    let mut estimate = 0.0;
    for _ in 0..100_000 {
        w.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..m {
            let a = data.row_dot(j, &v);
            data.add_row_scaled(j, a, &mut w);
        }
        // v has unit norm, so ‖AᵀAv‖ converges to the top eigenvalue
        let norm = squared_norm(&w).sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let done = (norm - estimate).abs() <= POWER_ITER_TOL * norm;
        estimate = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
        if done {
            return Ok(estimate);
        }
    }
    Err(Error::NoConvergence("power iteration for AᵀA".into()))
}
