use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A model parameter vector. Non-empty and finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(invalid("point must have at least one coordinate"));
        }
        if let Some(i) = coords.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("coordinate {i} is not finite")));
        }
        Ok(Self(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self(vec![0.0; dim])
    }

    pub fn filled(dim: usize, value: f64) -> Self {
        assert!(dim > 0 && value.is_finite());
        Self(vec![value; dim])
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn squared_distance(&self, other: &[f64]) -> f64 {
        squared_distance(&self.0, other)
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn squared_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// Declared constants of an objective.
///
/// `mu` is the strong-convexity (or PL) modulus and `smoothness` the
/// gradient Lipschitz constant. Stochastic gradients satisfy
/// `E‖ĝ − ∇F(x)‖² ≤ c‖∇F(x)‖² + sigma2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    pub mu: f64,
    pub smoothness: f64,
    pub c: f64,
    pub sigma2: f64,
    pub f_star: f64,
    pub x_star: Point,
}

impl ProblemConstants {
    pub fn new(
        mu: f64,
        smoothness: f64,
        c: f64,
        sigma2: f64,
        f_star: f64,
        x_star: Point,
    ) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(invalid(format!("mu must be > 0, got {mu}")));
        }
        if !(smoothness >= mu && smoothness.is_finite()) {
            return Err(invalid(format!(
                "smoothness must be >= mu ({mu}), got {smoothness}"
            )));
        }
        if !(c >= 0.0 && c.is_finite()) {
            return Err(invalid(format!("c must be >= 0, got {c}")));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(invalid(format!("sigma2 must be >= 0, got {sigma2}")));
        }
        if !f_star.is_finite() {
            return Err(invalid("f_star must be finite"));
        }
        Ok(Self {
            mu,
            smoothness,
            c,
            sigma2,
            f_star,
            x_star,
        })
    }

    /// Condition number L/mu (always >= 1).
    pub fn kappa(&self) -> f64 {
        self.smoothness / self.mu
    }
}
