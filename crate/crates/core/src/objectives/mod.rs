//! Experiment objectives: exact values and gradients, stochastic gradient
//! oracles and declared constants.

mod libsvm;
mod logistic;
mod piecewise;
mod quadratic;

pub use libsvm::{parse_libsvm, read_libsvm, Dataset};
pub use logistic::LogisticL2;
pub use piecewise::PiecewiseQuadratic1D;
pub use quadratic::QuadraticStrongGrowth;

use crate::error::{Error, Result};
use crate::model::{Point, ProblemConstants};
use crate::rng::RngStream;

/// A differentiable objective with a stochastic gradient oracle.
///
/// The slice-based methods assume `x.len() == self.dim()`; the checked free
/// functions [`value`], [`gradient`] and [`stochastic_gradient`] verify it.
/// Implementations must be immutable so one instance can serve concurrent
/// replications: all randomness comes from the stream argument.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn constants(&self) -> &ProblemConstants;

    fn value_at(&self, x: &[f64]) -> f64;

    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn stochastic_gradient_into(&self, x: &[f64], stream: &RngStream, out: &mut [f64]);
}

fn check_dim(obj: &dyn Objective, x: &[f64]) -> Result<()> {
    if x.len() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            actual: x.len(),
        });
    }
    Ok(())
}

/// Exact objective value `F(x)`.
pub fn value(obj: &dyn Objective, x: &Point) -> Result<f64> {
    check_dim(obj, x)?;
    Ok(obj.value_at(x))
}

/// Exact gradient `∇F(x)`.
pub fn gradient(obj: &dyn Objective, x: &Point) -> Result<Point> {
    check_dim(obj, x)?;
    let mut g = vec![0.0; obj.dim()];
    obj.gradient_into(x, &mut g);
    Ok(Point::from_vec_unchecked(g))
}

/// One stochastic gradient draw at `x`, keyed by the stream coordinates.
pub fn stochastic_gradient(obj: &dyn Objective, x: &Point, stream: &RngStream) -> Result<Point> {
    check_dim(obj, x)?;
    let mut g = vec![0.0; obj.dim()];
    obj.stochastic_gradient_into(x, stream, &mut g);
    Ok(Point::from_vec_unchecked(g))
}
