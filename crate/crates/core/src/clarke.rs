//! Sampled estimate of the Clarke directional derivative
//!
//! ```text
//! f°(x; d) = limsup_{t↓0, y→x} (f(y + t d) - f(y)) / t
//! ```
//!
//! The base point and the step shrink together: step sizes run over the
//! geometric grid `t_j = h_min · 2^j`, `j < n_levels`, and at level `j` the base
//! points `y` are `x` itself plus `n_samples` uniform draws from the ball of
//! radius `t_j` around `x`. The estimate is the largest difference quotient
//! seen. Each level draws from its own seeded stream, so raising `n_samples`
//! only appends samples and the estimate never decreases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, norm};
use crate::problem::Problem;
use crate::rng::{self, tags};

/// Sampling density for [`clarke_dir_deriv_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirDerivSampling {
    /// Finest step size.
    pub h_min: f64,
    /// Number of geometric step levels, so the coarsest step is `h_min · 2^(n_levels-1)`.
    pub n_levels: usize,
    /// Random base points per level (the unperturbed point is always included).
    pub n_samples: usize,
}

impl Default for DirDerivSampling {
    fn default() -> Self {
        Self {
            h_min: 1e-6,
            n_levels: 8,
            n_samples: 8,
        }
    }
}

impl DirDerivSampling {
    pub fn new(h_min: f64, n_samples: usize) -> Self {
        Self {
            h_min,
            n_samples,
            ..Self::default()
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.h_min > 0.0 && self.h_min.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "h_min must be positive and finite, got {}",
                self.h_min
            )));
        }
        if self.n_samples == 0 || self.n_levels == 0 {
            return Err(Error::InvalidParams(
                "n_samples and n_levels must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Estimates `F_i°(x; d)` from below-and-near by joint sampling of `(y, t)`.
pub fn clarke_dir_deriv_estimate(
    problem: &Problem,
    i: usize,
    x: &[f64],
    d: &[f64],
    sampling: &DirDerivSampling,
    seed: u64,
) -> Result<f64> {
    sampling.validate()?;
    if d.len() != problem.n() {
        return Err(Error::Dimension {
            expected: problem.n(),
            found: d.len(),
        });
    }
    if norm(d) <= 0.0 {
        return Err(Error::InvalidParams("direction must be nonzero".into()));
    }
    let n = problem.n();
    let quotient = |y: &[f64], t: f64| -> Result<f64> {
        let fy = problem.component_value(i, y)?;
        let fyt = problem.component_value(i, &axpy(y, t, d))?;
        Ok((fyt - fy) / t)
    };

    let mut best = f64::NEG_INFINITY;
    for level in 0..sampling.n_levels {
        let t = sampling.h_min * f64::powi(2.0, level as i32);
        best = best.max(quotient(x, t)?);
        let mut stream = rng::stream(seed, tags::CLARKE_LEVEL, level as u64);
        for _ in 0..sampling.n_samples {
            let offset = rng::in_ball(&mut stream, n, t);
            let y = axpy(x, 1.0, &offset);
            best = best.max(quotient(&y, t)?);
        }
    }
    Ok(best)
}
