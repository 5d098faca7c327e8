use crate::error::{invalid, Result};
use crate::model::{Point, ProblemConstants};
use crate::rng::RngStream;

use super::Objective;

/// `F(x) = Σ_i (i/2) x_i²` observed through
/// `f(x, ζ) = Σ_i (i/2) x_i² (1 + z1_i) + xᵀ z2`, with `z1_i ~ N(0, c1)` and
/// `z2_i ~ N(0, c2)`.
///
/// The gradient noise has second moment `c1‖∇F(x)‖² + d·c2`, so this is the
/// strong-growth model with `c = c1` and `σ² = d·c2`. Hessian is
/// `diag(1, …, d)`: `μ = 1`, `L = d`.
#[derive(Debug, Clone)]
pub struct QuadraticStrongGrowth {
    dim: usize,
    c1: f64,
    c2: f64,
    sd1: f64,
    sd2: f64,
    constants: ProblemConstants,
}

impl QuadraticStrongGrowth {
    pub fn new(dim: usize, c1: f64, c2: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("quadratic dimension must be >= 1"));
        }
        if !(c1 >= 0.0 && c1.is_finite()) || !(c2 >= 0.0 && c2.is_finite()) {
            return Err(invalid(format!(
                "noise variances must be finite and >= 0 (c1={c1}, c2={c2})"
            )));
        }
        let constants =
            ProblemConstants::new(1.0, dim as f64, c1, dim as f64 * c2, 0.0, Point::zeros(dim))?;
        Ok(Self {
            dim,
            c1,
            c2,
            sd1: c1.sqrt(),
            sd2: c2.sqrt(),
            constants,
        })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Eigenvalues of the (diagonal) Hessian.
    pub fn hessian_diagonal(&self) -> Vec<f64> {
        (1..=self.dim).map(|i| i as f64).collect()
    }
}

impl Objective for QuadraticStrongGrowth {
    fn name(&self) -> &str {
        "quadratic"
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| 0.5 * (i + 1) as f64 * v * v)
            .sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, (o, v)) in out.iter_mut().zip(x).enumerate() {
            *o = (i + 1) as f64 * v;
        }
    }

    fn stochastic_gradient_into(&self, x: &[f64], stream: &RngStream, out: &mut [f64]) {
        // coordinate i uses the Box–Muller pair i: (z1_i, z2_i)
        let s = stream.sampler();
        for (i, (o, v)) in out.iter_mut().zip(x).enumerate() {
            let (a, b) = s.normal_pair(i as u64);
            let z1 = self.sd1 * a;
            let z2 = self.sd2 * b;
            *o = (i + 1) as f64 * v * (1.0 + z1) + z2;
        }
    }
}
