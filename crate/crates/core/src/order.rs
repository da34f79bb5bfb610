//! Componentwise partial orders on objective space.
//!
//! `a ⪯ b` holds when `b - a` lies in the nonnegative orthant, `a ≺ b` when it
//! lies in the open positive orthant. Both are partial: most pairs of
//! objective vectors are incomparable.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{Point, Problem};

/// Default slack used by the solver when testing level-set membership.
pub const DEFAULT_FEAS_TOL: f64 = 1e-12;

/// A finite point of objective space `R^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `⟨self, w⟩`
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.0.iter().zip(w).map(|(a, b)| a * b).sum()
    }
}

impl Deref for ObjectiveVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::OrderDimension {
            left: a.len(),
            right: b.len(),
        });
    }
    for v in [a, b] {
        if let Some((index, &value)) = v.iter().enumerate().find(|(_, x)| x.is_nan()) {
            return Err(Error::NonFinite { index, value });
        }
    }
    Ok(())
}

/// `a ⪯ b`: every component of `a` is at most the matching component of `b`.
pub fn leq(a: &[f64], b: &[f64]) -> Result<bool> {
    check_pair(a, b)?;
    Ok(a.iter().zip(b).all(|(x, y)| x <= y))
}

/// `a ≺ b`: every component of `a` is strictly below the matching one of `b`.
pub fn lt(a: &[f64], b: &[f64]) -> Result<bool> {
    check_pair(a, b)?;
    Ok(a.iter().zip(b).all(|(x, y)| x < y))
}

/// `a ⪯ b + tol` componentwise.
pub fn leq_within(a: &[f64], b: &[f64], tol: f64) -> Result<bool> {
    check_pair(a, b)?;
    Ok(a.iter().zip(b).all(|(x, y)| *x <= *y + tol))
}

/// Pareto dominance: `a ⪯ b` and `a ≠ b`.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    Ok(leq(a, b)? && a != b)
}

/// Tests `x ∈ Ω = {y : F(y) ⪯ F(x_ref)}` with slack `feas_tol`.
pub fn in_level_set(problem: &Problem, x: &Point, x_ref: &Point, feas_tol: f64) -> Result<bool> {
    let fx = problem.evaluate(x)?;
    let fr = problem.evaluate(x_ref)?;
    leq_within(&fx, &fr, feas_tol)
}

/// Indices of the entries not dominated by any other entry.
pub fn nondominated_mask(points: &[ObjectiveVector]) -> Result<Vec<bool>> {
    let mut mask = vec![true; points.len()];
    for (i, a) in points.iter().enumerate() {
        for (j, b) in points.iter().enumerate() {
            if i != j && dominates(b, a)? {
                mask[i] = false;
                break;
            }
        }
    }
    Ok(mask)
}
