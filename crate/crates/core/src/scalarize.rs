//! The per-iteration regularized scalarization
//!
//! ```text
//! φ_k(x) = ⟨F(x), z_k⟩ + (β_k / 2) ‖x - x^k‖²,   β_k = α_k ⟨e_k, z_k⟩
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dist, dot, norm};
use crate::problem::{Point, Problem};

/// Default upper bound `ᾱ` on the proximal parameter.
pub const DEFAULT_ALPHA_BAR: f64 = 1e6;

const NORM_TOL: f64 = 1e-12;

/// The triple `(z_k, e_k, α_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizationParams {
    pub z: Vec<f64>,
    pub e: Vec<f64>,
    pub alpha: f64,
}

impl ScalarizationParams {
    /// Validated parameters: `z ≥ 0`, `z ≠ 0`, `‖z‖ = 1`, `e ≻ 0`, `‖e‖ = 1`
    /// and `0 < α < α_bar`.
    pub fn new(z: Vec<f64>, e: Vec<f64>, alpha: f64, alpha_bar: f64) -> Result<Self> {
        let p = Self::new_unnormalized(z, e, alpha)?;
        for (name, v) in [("z", &p.z), ("e", &p.e)] {
            if (norm(v) - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidParams(format!(
                    "{name} must have unit norm, got ‖{name}‖ = {}",
                    norm(v)
                )));
            }
        }
        if !(p.alpha < alpha_bar) {
            return Err(Error::InvalidParams(format!(
                "alpha must satisfy 0 < α_k < ᾱ = {alpha_bar}, got {}",
                p.alpha
            )));
        }
        Ok(p)
    }

    /// Like [`ScalarizationParams::new`] but without the unit-norm and `ᾱ`
    /// checks. Positive rescalings of `z` leave the minimizers of `φ`
    /// unchanged, which this constructor lets callers exercise.
    pub fn new_unnormalized(z: Vec<f64>, e: Vec<f64>, alpha: f64) -> Result<Self> {
        if z.is_empty() || z.len() != e.len() {
            return Err(Error::InvalidParams(format!(
                "z and e must have the same nonzero length, got {} and {}",
                z.len(),
                e.len()
            )));
        }
        if z.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || z.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidParams(
                "z must be nonnegative, finite and nonzero".into(),
            ));
        }
        if e.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParams("e must be strictly positive".into()));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "alpha must satisfy 0 < α_k < ᾱ, got {alpha}"
            )));
        }
        Ok(Self { z, e, alpha })
    }

    /// Normalizes raw nonnegative weights (and `e`, defaulting to uniform) to
    /// unit length before validating.
    pub fn from_weights(weights: &[f64], e: Option<&[f64]>, alpha: f64, alpha_bar: f64) -> Result<Self> {
        let m = weights.len();
        let nz = norm(weights);
        if m == 0 || !(nz > 0.0) || !nz.is_finite() {
            return Err(Error::InvalidParams(
                "weights must be nonnegative and not all zero".into(),
            ));
        }
        let e = match e {
            Some(e) => {
                let ne = norm(e);
                if !(ne > 0.0 && ne.is_finite()) {
                    return Err(Error::InvalidParams("e must be strictly positive".into()));
                }
                e.iter().map(|v| v / ne).collect()
            }
            None => vec![1.0 / (m as f64).sqrt(); m],
        };
        Self::new(weights.iter().map(|v| v / nz).collect(), e, alpha, alpha_bar)
    }

    /// `z = e = (1/√m, …)`.
    pub fn uniform(m: usize, alpha: f64) -> Result<Self> {
        Self::from_weights(&vec![1.0; m], None, alpha, DEFAULT_ALPHA_BAR)
    }

    pub fn m(&self) -> usize {
        self.z.len()
    }

    /// `β = α ⟨e, z⟩`, strictly positive.
    pub fn beta(&self) -> f64 {
        self.alpha * dot(&self.e, &self.z)
    }

    /// Indices of zero weights: those objectives only act through the level set.
    pub fn zero_weight_indices(&self) -> Vec<usize> {
        self.z
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// `β = α ⟨e, z⟩`
pub fn beta(params: &ScalarizationParams) -> f64 {
    params.beta()
}

/// `φ_k` for one outer iteration, centred at `x^k`.
#[derive(Debug, Clone)]
pub struct RegularizedObjective {
    base: Problem,
    params: ScalarizationParams,
    center: Point,
}

impl RegularizedObjective {
    pub fn new(base: Problem, params: ScalarizationParams, center: Point) -> Result<Self> {
        if params.m() != base.m() {
            return Err(Error::Dimension {
                expected: base.m(),
                found: params.m(),
            });
        }
        if center.dim() != base.n() {
            return Err(Error::Dimension {
                expected: base.n(),
                found: center.dim(),
            });
        }
        crate::problem::check_finite(&center)?;
        Ok(Self {
            base,
            params,
            center,
        })
    }

    pub fn base(&self) -> &Problem {
        &self.base
    }

    pub fn params(&self) -> &ScalarizationParams {
        &self.params
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn beta(&self) -> f64 {
        self.params.beta()
    }

    /// `⟨F(x), z⟩ + (β/2) ‖x - center‖²`
    pub fn phi_value(&self, x: &[f64]) -> Result<f64> {
        let f = self.base.evaluate(x)?;
        let r = dist(x, &self.center);
        Ok(f.dot(&self.params.z) + 0.5 * self.beta() * r * r)
    }

    /// `Σ z_i g_i + β (x - center)` with `g_i` the component subgradient selections.
    /// Components with zero weight are not queried.
    pub fn phi_subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let beta = self.beta();
        let mut g: Vec<f64> = x.iter().zip(self.center.iter()).map(|(a, c)| beta * (a - c)).collect();
        for (i, &zi) in self.params.z.iter().enumerate() {
            if zi == 0.0 {
                continue;
            }
            let gi = self.base.subgradient(i, x)?;
            for (o, v) in g.iter_mut().zip(&gi) {
                *o += zi * v;
            }
        }
        Ok(g)
    }
}
