//! Certificates of (approximate) Pareto-Clarke criticality.
//!
//! A point is critical when no direction decreases every objective at once:
//! for each `d` some component has `F_i°(x; d) ≥ 0`. For smooth problems this
//! is `0 ∈ conv{∇F_i(x)}`, tested through the min-norm convex combination of
//! the gradients. Otherwise directions are sampled and the Clarke directional
//! derivatives estimated. The sampled test can refute criticality outright
//! but only supports it statistically.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clarke::{clarke_dir_deriv_estimate, DirDerivSampling};
use crate::error::{Error, Result};
use crate::linalg::{axpy, scale};
use crate::order::lt;
use crate::problem::{Point, Problem};
use crate::rng::{self, tags};
use crate::simplex::min_norm_combination;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CritMethod {
    SmoothQp,
    SampledDirections,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    /// Smooth test: min-norm value (≥ 0). Sampled test: the smallest over the
    /// sampled directions of the largest component derivative estimate.
    pub residual: f64,
    pub method: CritMethod,
    /// A common descent direction, present only when the point failed.
    pub witness_direction: Option<Point>,
    pub n_directions: usize,
    pub critical: bool,
    pub crit_tol: f64,
}

/// Knobs for [`sampled_pareto_clarke_test`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledTestOptions {
    pub n_dirs: usize,
    pub sampling: DirDerivSampling,
    pub crit_tol: f64,
}

impl Default for SampledTestOptions {
    fn default() -> Self {
        Self {
            n_dirs: 64,
            sampling: DirDerivSampling::default(),
            crit_tol: 1e-3,
        }
    }
}

/// Tolerances and budgets for [`check_criticality`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalityOptions {
    pub smooth_tol: f64,
    pub qp_iters: usize,
    pub sampled: SampledTestOptions,
}

impl Default for CriticalityOptions {
    fn default() -> Self {
        Self {
            smooth_tol: 1e-5,
            qp_iters: 200,
            sampled: SampledTestOptions::default(),
        }
    }
}

/// `min_{λ ∈ Δ} ‖Σ λ_i ∇F_i(x)‖`; the witness `-Σ λ*_i ∇F_i(x)` is a common
/// descent direction whenever the residual exceeds `crit_tol`.
pub fn smooth_criticality_residual(problem: &Problem, x: &[f64], qp_iters: usize, crit_tol: f64) -> Result<CriticalityReport> {
    if !problem.is_smooth() {
        return Err(Error::MethodMismatch(format!(
            "smooth criticality test needs a smooth problem, `{}` is not",
            problem.name()
        )));
    }
    let grads = problem.subgradients(x)?;
    let mn = min_norm_combination(&grads, qp_iters);
    let critical = mn.norm <= crit_tol;
    Ok(CriticalityReport {
        residual: mn.norm,
        method: CritMethod::SmoothQp,
        witness_direction: (!critical).then(|| Point::from(scale(&mn.point, -1.0))),
        n_directions: 0,
        critical,
        crit_tol,
    })
}

/// Samples `n_dirs` unit directions in antithetic pairs `(d, -d)` and
/// estimates `max_i F_i°(x; d)` for each. The residual is the smallest such
/// value; the point passes when the residual is at least `-crit_tol`.
pub fn sampled_pareto_clarke_test(problem: &Problem, x: &[f64], opts: &SampledTestOptions, seed: u64) -> Result<CriticalityReport> {
    if opts.n_dirs == 0 {
        return Err(Error::InvalidParams("n_dirs must be at least 1".into()));
    }
    if !(opts.crit_tol > 0.0) {
        return Err(Error::InvalidParams("crit_tol must be positive".into()));
    }
    opts.sampling.validate()?;
    let n = problem.n();
    let m = problem.m();

    let mut stream = rng::stream(seed, tags::CRIT_DIRS, 0);
    let mut dirs = Vec::with_capacity(opts.n_dirs + 1);
    while dirs.len() < opts.n_dirs {
        let d = rng::unit_direction(&mut stream, n);
        dirs.push(scale(&d, -1.0));
        dirs.push(d);
    }
    dirs.truncate(opts.n_dirs);

    let worst: Vec<f64> = dirs
        .par_iter()
        .enumerate()
        .map(|(k, d)| {
            (0..m).try_fold(f64::NEG_INFINITY, |acc, i| {
                let s = rng::substream_seed(seed, tags::CRIT_DIR_EST, (k * m + i) as u64);
                clarke_dir_deriv_estimate(problem, i, x, d, &opts.sampling, s).map(|v| acc.max(v))
            })
        })
        .collect::<Result<_>>()?;

    let (best_k, residual) = worst
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bk, bv), (k, &v)| if v < bv { (k, v) } else { (bk, bv) });
    let critical = residual >= -opts.crit_tol;
    Ok(CriticalityReport {
        residual,
        method: CritMethod::SampledDirections,
        witness_direction: (!critical).then(|| Point::from(dirs[best_k].clone())),
        n_directions: dirs.len(),
        critical,
        crit_tol: opts.crit_tol,
    })
}

/// Smooth QP test for smooth problems, sampled-direction test otherwise.
pub fn check_criticality(problem: &Problem, x: &[f64], opts: &CriticalityOptions, seed: u64) -> Result<CriticalityReport> {
    if problem.is_smooth() {
        smooth_criticality_residual(problem, x, opts.qp_iters, opts.smooth_tol)
    } else {
        sampled_pareto_clarke_test(problem, x, &opts.sampled, seed)
    }
}

/// Step sizes tried by [`line_probe_descent`].
pub const PROBE_STEPS: [f64; 5] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// First `t` in [`PROBE_STEPS`] with `F(x + t d) ≺ F(x)`, if any.
pub fn line_probe_descent(problem: &Problem, x: &[f64], d: &[f64]) -> Result<Option<f64>> {
    let fx = problem.evaluate(x)?;
    for t in PROBE_STEPS {
        let ft = problem.evaluate(&axpy(x, t, d))?;
        if lt(&ft, &fx)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}
