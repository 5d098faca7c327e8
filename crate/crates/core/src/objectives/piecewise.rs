use crate::error::{invalid, Result};
use crate::model::{Point, ProblemConstants};
use crate::rng::RngStream;

use super::Objective;

/// One-dimensional `F(x) = x²/2` for `x <= 0` and `x²` for `x > 0`.
///
/// Continuously differentiable with `μ = 1`, `L = 2`, but not twice
/// differentiable at the minimizer 0. Gradients carry additive `N(0, σ²)`
/// noise.
#[derive(Debug, Clone)]
pub struct PiecewiseQuadratic1D {
    sigma: f64,
    constants: ProblemConstants,
}

impl PiecewiseQuadratic1D {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        let constants = ProblemConstants::new(1.0, 2.0, 0.0, sigma * sigma, 0.0, Point::zeros(1))?;
        Ok(Self { sigma, constants })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn grad(x: f64) -> f64 {
        // both one-sided derivatives are 0 at the kink
        if x <= 0.0 {
            x
        } else {
            2.0 * x
        }
    }
}

impl Objective for PiecewiseQuadratic1D {
    fn name(&self) -> &str {
        "piecewise"
    }

    fn dim(&self) -> usize {
        1
    }

    fn constants(&self) -> &ProblemConstants {
        &self.constants
    }

    fn value_at(&self, x: &[f64]) -> f64 {
        let v = x[0];
        if v <= 0.0 {
            0.5 * v * v
        } else {
            v * v
        }
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out[0] = Self::grad(x[0]);
    }

    fn stochastic_gradient_into(&self, x: &[f64], stream: &RngStream, out: &mut [f64]) {
        out[0] = Self::grad(x[0]) + self.sigma * stream.standard_normal(0);
    }
}
