//! Inner solver for one outer step: approximately minimize `φ_k` over the
//! level set `Ω_k = {x : F(x) ⪯ F(x^k)}` without ever leaving it.
//!
//! Each iteration first tries a backtracked step along the plain subgradient
//! selection of `φ_k`. When that step is rejected or negligible, a bundle is
//! assembled from
//!
//! * `φ_k`-subgradients at `x` and (for nonsmooth problems) at points sampled
//!   in a ball of radius `ε` around `x`, and
//! * subgradients of every component `F_i` that could reach its level-set
//!   bound within distance `ε`,
//!
//! and the negative min-norm element of its convex hull is tried as the
//! search direction. That direction decreases `φ_k` and every nearly-active
//! constraint to first order, which is how the normal-cone term of the
//! optimality condition is honoured. `ε` shrinks by a factor of ten whenever
//! the bundle direction fails, down to `min_radius`.
//!
//! On smooth problems the final point is refined by Newton's method on the
//! optimality system of `φ_k` with the nearly-active constraints held as
//! equalities. The refined point replaces the old one only if it stays in
//! `Ω_k`, has nonnegative multipliers, does not raise `φ_k` beyond rounding
//! and has a smaller optimality residual.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{axpy, dist, dot, norm};
use crate::order::{leq_within, ObjectiveVector, DEFAULT_FEAS_TOL};
use crate::problem::Point;
use crate::rng::{self, tags, StreamRng};
use crate::scalarize::RegularizedObjective;
use crate::simplex::min_norm_combination;

/// Inner-solver knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerOptions {
    pub max_inner_iters: usize,
    /// First trial step `t`; plain gradient steps adapt it from there.
    pub step_init: f64,
    /// Sufficient-decrease constant in `(0, 1)`.
    pub armijo_c: f64,
    /// Step shrink factor in `(0, 1)`.
    pub backtrack_ratio: f64,
    /// Stop once an accepted step moves less than this.
    pub inner_tol: f64,
    /// Slack on the level-set test.
    pub feas_tol: f64,
    /// Trial steps per line search.
    pub max_backtracks: usize,
    /// Starts for problems not flagged convex (at most 3 are used).
    pub n_starts: usize,
    /// Initial bundle radius `ε`.
    pub bundle_radius: f64,
    /// Smallest bundle radius before the solver gives up.
    pub min_radius: f64,
    /// Record every accepted point in [`InnerResult::accepted`].
    #[serde(default)]
    pub record_trace: bool,
}

impl Default for InnerOptions {
    fn default() -> Self {
        Self {
            max_inner_iters: 500,
            step_init: 1.0,
            armijo_c: 1e-4,
            backtrack_ratio: 0.5,
            inner_tol: 1e-12,
            feas_tol: DEFAULT_FEAS_TOL,
            max_backtracks: 200,
            n_starts: 3,
            bundle_radius: 1e-2,
            min_radius: 1e-10,
            record_trace: false,
        }
    }
}

impl InnerOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_init", self.step_init),
            ("inner_tol", self.inner_tol),
            ("bundle_radius", self.bundle_radius),
            ("min_radius", self.min_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.feas_tol >= 0.0 && self.feas_tol.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "feas_tol must be nonnegative, got {}",
                self.feas_tol
            )));
        }
        for (name, v) in [("armijo_c", self.armijo_c), ("backtrack_ratio", self.backtrack_ratio)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParams(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        if self.max_inner_iters == 0 || self.max_backtracks == 0 || self.n_starts == 0 {
            return Err(Error::InvalidParams(
                "max_inner_iters, max_backtracks and n_starts must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of [`solve_subproblem`].
#[derive(Debug, Clone, PartialEq)]
pub struct InnerResult {
    pub x_next: Point,
    pub phi_final: f64,
    /// Norm of the final search direction at `x_next` (min-norm bundle element).
    pub residual: f64,
    pub inner_iters: usize,
    /// `x_next ∈ Ω_k` within `feas_tol`.
    pub feasible: bool,
    /// No feasible decrease was found; `x_next` is the center.
    pub stalled: bool,
    /// Accepted points of every start, when tracing is on.
    pub accepted: Vec<Point>,
}

/// Multiple of `ε|φ|` treated as rounding noise in `φ`.
const ROUNDING_SLACK: f64 = 64.0;
/// Bound on the first plain trial step relative to `step_init`, in either direction.
const MAX_STEP_RESCALE: f64 = 1e6;
/// Decrease relative to `t‖g‖²` above which the next plain trial grows.
const GROWTH_RATIO: f64 = 0.5;
/// Relative level-set gap under which a constraint counts as active in the Newton refinement.
const ACTIVE_GAP: f64 = 1e-6;
const POLISH_ITERS: usize = 50;
const NEWTON_HALVINGS: usize = 30;
/// Relative central-difference step for Hessian columns.
const HESSIAN_STEP: f64 = 1e-5;

/// Point, multipliers, starting residual norm, final residual norm.
type NewtonOutcome = (Vec<f64>, Vec<f64>, f64, f64);

struct Ctx<'a> {
    reg: &'a RegularizedObjective,
    opts: &'a InnerOptions,
    f_center: ObjectiveVector,
}

struct Eval {
    phi: f64,
    f: ObjectiveVector,
}

impl<'a> Ctx<'a> {
    fn new(reg: &'a RegularizedObjective, opts: &'a InnerOptions) -> Result<Self> {
        opts.validate()?;
        let f_center = reg.base().evaluate(reg.center())?;
        Ok(Self { reg, opts, f_center })
    }

    fn eval(&self, x: &[f64]) -> Result<Eval> {
        let f = self.reg.base().evaluate(x)?;
        let r = dist(x, self.reg.center());
        let phi = f.dot(&self.reg.params().z) + 0.5 * self.reg.beta() * r * r;
        Ok(Eval { phi, f })
    }

    /// Evaluation at a trial point; overflow or other non-finite values reject it.
    fn try_eval(&self, x: &[f64]) -> Result<Option<Eval>> {
        match self.eval(x) {
            Ok(e) => Ok(Some(e)),
            Err(Error::Evaluation { .. }) | Err(Error::NonFinite { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn feasible(&self, f: &ObjectiveVector) -> bool {
        leq_within(f, &self.f_center, self.opts.feas_tol).unwrap_or(false)
    }

    /// Largest `t = t0 · ratio^j` with Armijo decrease and `x - t d ∈ Ω`.
    ///
    /// `grad_norm` is `‖∇φ(x)‖` when `d` is that gradient of a smooth `φ`. Once
    /// the predicted decrease `t‖d‖²` drops below the rounding level of `φ`,
    /// a trial is then also accepted if `φ` does not rise beyond rounding and
    /// the gradient norm strictly shrinks, and only then.
    fn backtrack(&self, x: &[f64], phi_x: f64, dir: &[f64], grad_norm: Option<f64>, t0: f64) -> Result<Option<(Vec<f64>, Eval, f64)>> {
        let dd = crate::linalg::dot(dir, dir);
        if !(dd > 0.0) {
            return Ok(None);
        }
        let noise = self.rounding(phi_x);
        let mut t = t0;
        for _ in 0..self.opts.max_backtracks {
            let trial = axpy(x, -t, dir);
            if trial.iter().all(|v| v.is_finite()) {
                if let Some(e) = self.try_eval(&trial)? {
                    if self.feasible(&e.f) {
                        let accept = match grad_norm {
                            Some(gn) if t * dd <= noise => {
                                e.phi <= phi_x + noise && norm(&self.reg.phi_subgradient(&trial)?) < gn
                            }
                            _ => e.phi < phi_x && e.phi <= phi_x - self.opts.armijo_c * t * dd,
                        };
                        if accept {
                            return Ok(Some((trial, e, t)));
                        }
                    }
                }
            }
            t *= self.opts.backtrack_ratio;
            if t * dd.sqrt() < f64::EPSILON * (1.0 + norm(x)) {
                break;
            }
        }
        Ok(None)
    }

    fn rounding(&self, phi: f64) -> f64 {
        ROUNDING_SLACK * f64::EPSILON * phi.abs()
    }

    /// `∇φ(x) + Σ λ_j ∇F_{a_j}(x)` followed by `F_{a_j}(x) - F_{a_j}(center)`.
    fn kkt_residual(&self, x: &[f64], active: &[usize], lambda: &[f64]) -> Result<Vec<f64>> {
        let base = self.reg.base();
        let mut r = self.reg.phi_subgradient(x)?;
        for (&i, &l) in active.iter().zip(lambda) {
            r = axpy(&r, l, &base.subgradient(i, x)?);
        }
        for &i in active {
            r.push(base.component_value(i, x)? - self.f_center[i]);
        }
        Ok(r)
    }

    fn lagrangian_gradient(&self, x: &[f64], active: &[usize], lambda: &[f64]) -> Result<Vec<f64>> {
        let r = self.kkt_residual(x, active, lambda)?;
        Ok(r[..x.len()].to_vec())
    }

    /// Least-squares multipliers for `∇φ(x) + Gᵀλ = 0`.
    fn multipliers(&self, x: &[f64], active: &[usize]) -> Result<Option<Vec<f64>>> {
        if active.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let n = x.len();
        let base = self.reg.base();
        let mut g = DMatrix::zeros(n, active.len());
        for (j, &i) in active.iter().enumerate() {
            g.set_column(j, &DVector::from_vec(base.subgradient(i, x)?));
        }
        let rhs = -(g.transpose() * DVector::from_vec(self.reg.phi_subgradient(x)?));
        Ok((g.transpose() * &g).lu().solve(&rhs).map(|l| l.iter().copied().collect()))
    }

    /// Newton's method on the optimality system with `active` held as equalities.
    /// Returns the final point, its multipliers, and the residual norms at the
    /// start and at the end.
    fn newton_kkt(&self, x: &[f64], active: &[usize]) -> Result<Option<NewtonOutcome>> {
        let base = self.reg.base();
        let (n, a) = (x.len(), active.len());
        let Some(mut lambda) = self.multipliers(x, active)? else {
            return Ok(None);
        };
        let start_res = norm(&self.kkt_residual(x, active, &lambda)?);
        let mut y = x.to_vec();
        let mut res = start_res;
        for _ in 0..POLISH_ITERS {
            let r = self.kkt_residual(&y, active, &lambda)?;
            let mut jac = DMatrix::zeros(n + a, n + a);
            for j in 0..n {
                let h = HESSIAN_STEP * y[j].abs().max(1.0);
                let mut up = y.clone();
                let mut down = y.clone();
                up[j] += h;
                down[j] -= h;
                let (Ok(gu), Ok(gd)) = (
                    self.lagrangian_gradient(&up, active, &lambda),
                    self.lagrangian_gradient(&down, active, &lambda),
                ) else {
                    return Ok(None);
                };
                for k in 0..n {
                    jac[(k, j)] = (gu[k] - gd[k]) / (2.0 * h);
                }
            }
            for (c, &i) in active.iter().enumerate() {
                let gi = base.subgradient(i, &y)?;
                for k in 0..n {
                    jac[(k, n + c)] = gi[k];
                    jac[(n + c, k)] = gi[k];
                }
            }
            let Some(step) = jac.lu().solve(&-DVector::from_vec(r)) else {
                break;
            };
            // halve the Newton step until the residual drops
            let mut damp = 1.0;
            let mut improved = None;
            for _ in 0..NEWTON_HALVINGS {
                let y_next: Vec<f64> = y.iter().zip(step.iter()).map(|(v, d)| v + damp * d).collect();
                let l_next: Vec<f64> = lambda.iter().zip(step.iter().skip(n)).map(|(v, d)| v + damp * d).collect();
                if y_next.iter().chain(&l_next).all(|v| v.is_finite()) {
                    if let Ok(r) = self.kkt_residual(&y_next, active, &l_next) {
                        if norm(&r) < res {
                            improved = Some((y_next, l_next, norm(&r)));
                            break;
                        }
                    }
                }
                damp *= 0.5;
            }
            let Some((y_next, l_next, res_next)) = improved else {
                break;
            };
            y = y_next;
            lambda = l_next;
            res = res_next;
        }
        Ok(Some((y, lambda, start_res, res)))
    }

    /// `φ(x) + Σ λ_j (F_{a_j}(x) - F_{a_j}(center))`.
    fn lagrangian(&self, e: &Eval, active: &[usize], lambda: &[f64]) -> f64 {
        e.phi + active.iter().zip(lambda).map(|(&i, l)| l * (e.f[i] - self.f_center[i])).sum::<f64>()
    }

    /// Newton refinement of a smooth subproblem, starting from the nearly
    /// active constraints and adjusting the active set when the refined point
    /// leaves `Ω` or a multiplier turns negative. `None` when no refinement is
    /// accepted.
    fn kkt_polish(&self, x: &[f64], cur: &Eval) -> Result<Option<(Vec<f64>, Eval)>> {
        let m = self.reg.base().m();
        let mut active: Vec<usize> = (0..m)
            .filter(|&i| self.f_center[i] - cur.f[i] <= ACTIVE_GAP * (1.0 + self.f_center[i].abs()))
            .collect();
        for _ in 0..=2 * m {
            if active.len() > x.len() {
                return Ok(None);
            }
            let Some((y, lambda, start_res, res)) = self.newton_kkt(x, &active)? else {
                return Ok(None);
            };
            if let Some((j, _)) = lambda
                .iter()
                .enumerate()
                .filter(|(_, l)| **l < 0.0)
                .min_by(|a, b| a.1.total_cmp(b.1))
            {
                active.remove(j);
                continue;
            }
            let Some(e) = self.try_eval(&y)? else {
                return Ok(None);
            };
            if !self.feasible(&e.f) {
                let violated: Vec<usize> = (0..m)
                    .filter(|i| !active.contains(i) && e.f[*i] > self.f_center[*i] + self.opts.feas_tol)
                    .collect();
                if violated.is_empty() {
                    return Ok(None);
                }
                active.extend(violated);
                active.sort_unstable();
                continue;
            }
            // the old point may sit inside the feasibility slack, so compare Lagrangians
            let l_old = self.lagrangian(cur, &active, &lambda);
            let accept = res < start_res && self.lagrangian(&e, &active, &lambda) <= l_old + self.rounding(l_old);
            return Ok(accept.then_some((y, e)));
        }
        Ok(None)
    }

    fn bundle_direction(&self, x: &[f64], f_x: &ObjectiveVector, eps: f64, stream: &mut StreamRng) -> Result<Vec<f64>> {
        let base = self.reg.base();
        let n = base.n();
        let smooth = base.is_smooth();
        let samples: Vec<Vec<f64>> = if smooth {
            Vec::new()
        } else {
            (0..2 * n + 1)
                .map(|_| axpy(x, 1.0, &rng::in_ball(stream, n, eps)))
                .collect()
        };
        let mut bundle = vec![self.reg.phi_subgradient(x)?];
        for y in &samples {
            if let Ok(g) = self.reg.phi_subgradient(y) {
                bundle.push(g);
            }
        }
        for i in 0..base.m() {
            let gi = base.subgradient(i, x)?;
            let gap = self.f_center[i] + self.opts.feas_tol - f_x[i];
            if gap <= eps * norm(&gi) + self.opts.feas_tol {
                bundle.push(gi);
                for y in &samples {
                    if let Ok(g) = base.subgradient(i, y) {
                        bundle.push(g);
                    }
                }
            }
        }
        Ok(min_norm_combination(&bundle, 500).point)
    }
}

struct Descent {
    x: Vec<f64>,
    eval: Eval,
    residual: f64,
    iters: usize,
}

fn descend(ctx: &Ctx<'_>, start: Vec<f64>, start_eval: Eval, stream: &mut StreamRng, trace: &mut Vec<Point>) -> Result<Descent> {
    let opts = ctx.opts;
    let mut x = start;
    let mut cur = start_eval;
    let mut eps = opts.bundle_radius;
    let mut t_plain = opts.step_init;
    let mut iters = 0;
    let mut exhausted = false;

    while iters < opts.max_inner_iters {
        iters += 1;
        let g = ctx.reg.phi_subgradient(&x)?;
        if norm(&g) <= opts.inner_tol {
            break;
        }
        let smooth_norm = ctx.reg.base().is_smooth().then(|| norm(&g));
        let plain = ctx.backtrack(&x, cur.phi, &g, smooth_norm, t_plain)?;
        if let Some((xn, e, t)) = &plain {
            // on smooth problems, grow the next trial while the decrease tracks the linear model,
            // shrink it once steps overshoot, and keep it where decreases are lost in rounding
            let predicted = t * dot(&g, &g);
            let ratio = (cur.phi - e.phi) / predicted;
            let next = if smooth_norm.is_none() {
                opts.step_init
            } else if predicted <= ctx.rounding(cur.phi) {
                *t
            } else if ratio >= GROWTH_RATIO {
                t / opts.backtrack_ratio
            } else {
                t * opts.backtrack_ratio
            };
            t_plain = next.clamp(opts.step_init / MAX_STEP_RESCALE, opts.step_init * MAX_STEP_RESCALE);
            if t * norm(&g) > opts.inner_tol {
                x = xn.clone();
                cur = Eval { phi: e.phi, f: e.f.clone() };
                if opts.record_trace {
                    trace.push(Point::from(x.clone()));
                }
                continue;
            }
        }

        // plain step rejected or negligible: bundle directions at shrinking radii
        let mut moved = false;
        while eps >= opts.min_radius {
            let d = ctx.bundle_direction(&x, &cur.f, eps, stream)?;
            if norm(&d) > opts.inner_tol {
                if let Some((xn, e, t)) = ctx.backtrack(&x, cur.phi, &d, None, opts.step_init)? {
                    let step = t * norm(&d);
                    x = xn;
                    cur = e;
                    if opts.record_trace {
                        trace.push(Point::from(x.clone()));
                    }
                    moved = true;
                    if step > opts.inner_tol {
                        break;
                    }
                }
            }
            eps *= 0.1;
        }
        if !moved {
            if let Some((xn, e, _)) = plain {
                x = xn;
                cur = e;
                if opts.record_trace {
                    trace.push(Point::from(x.clone()));
                }
            }
        }
        if eps < opts.min_radius {
            exhausted = true;
            break;
        }
    }

    if ctx.reg.base().is_smooth() {
        if let Some((xn, e)) = ctx.kkt_polish(&x, &cur)? {
            x = xn;
            cur = e;
            if opts.record_trace {
                trace.push(Point::from(x.clone()));
            }
        }
    }

    let final_eps = if exhausted { opts.min_radius } else { eps };
    let residual = norm(&ctx.bundle_direction(&x, &cur.f, final_eps, stream)?);
    Ok(Descent {
        x,
        eval: cur,
        residual,
        iters,
    })
}

/// Approximately solves one outer step: returns a point of `Ω_k` whose `φ_k`
/// value is no larger than at the center.
///
/// Problems not flagged convex get up to three starts (the center, one plain
/// subgradient step from it, one seeded perturbation); the best `φ_k` wins,
/// ties going to the earlier start. Infeasible starts are skipped.
pub fn solve_subproblem(reg: &RegularizedObjective, opts: &InnerOptions, seed: u64) -> Result<InnerResult> {
    let ctx = Ctx::new(reg, opts)?;
    let center = reg.center().to_vec();
    let center_eval = ctx.eval(&center)?;
    let phi_center = center_eval.phi;

    let mut starts: Vec<(Vec<f64>, Eval)> = vec![(center.clone(), center_eval)];
    if !reg.base().flags().claimed_convex && opts.n_starts > 1 {
        let g = reg.phi_subgradient(&center)?;
        let mut candidates = vec![axpy(&center, -opts.step_init, &g)];
        if opts.n_starts > 2 {
            let mut stream = rng::stream(seed, tags::INNER_START, 0);
            let radius = opts.step_init * norm(&g).clamp(1e-3, 1.0);
            candidates.push(axpy(&center, 1.0, &rng::in_ball(&mut stream, reg.base().n(), radius)));
        }
        for c in candidates.into_iter().take(opts.n_starts - 1) {
            if let Some(e) = ctx.try_eval(&c)? {
                if ctx.feasible(&e.f) {
                    starts.push((c, e));
                }
            }
        }
    }

    let mut accepted = Vec::new();
    let mut best: Option<Descent> = None;
    let mut total_iters = 0;
    for (k, (x0, e0)) in starts.into_iter().enumerate() {
        if opts.record_trace {
            accepted.push(Point::from(x0.clone()));
        }
        let mut stream = rng::stream(seed, tags::INNER_BUNDLE, k as u64);
        let run = descend(&ctx, x0, e0, &mut stream, &mut accepted)?;
        total_iters += run.iters;
        if best.as_ref().is_none_or(|b| run.eval.phi < b.eval.phi) {
            best = Some(run);
        }
    }
    let best = best.expect("at least the center start runs");

    let stalled = !(best.eval.phi < phi_center);
    let (x_next, phi_final) = if stalled {
        (center, phi_center)
    } else {
        (best.x, best.eval.phi)
    };
    let feasible = ctx.feasible(&reg.base().evaluate(&x_next)?);
    Ok(InnerResult {
        x_next: Point::from(x_next),
        phi_final,
        residual: best.residual,
        inner_iters: total_iters,
        feasible,
        stalled,
        accepted,
    })
}

/// One backtracked step from `x` along `-g`, returning `(x - t g, t)` for the
/// largest tested `t ≤ step_init` that gives Armijo decrease of `φ` while
/// staying in the level set of the center, or `(x, 0)` if none does.
pub fn feasible_backtrack(reg: &RegularizedObjective, x: &Point, g: &[f64], opts: &InnerOptions) -> Result<(Point, f64)> {
    let ctx = Ctx::new(reg, opts)?;
    let phi_x = ctx.eval(x)?.phi;
    Ok(match ctx.backtrack(x, phi_x, g, None, opts.step_init)? {
        Some((xn, _, t)) => (Point::from(xn), t),
        None => (x.clone(), 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::make_convex_quadratic;
    use crate::order::in_level_set;
    use crate::scalarize::{ScalarizationParams, DEFAULT_ALPHA_BAR};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pair() -> crate::problem::Problem {
        make_convex_quadratic(&[vec![0.0].into(), vec![1.0].into()]).unwrap()
    }

    fn reg(p: crate::problem::Problem, z: Vec<f64>, e: Vec<f64>, alpha: f64, c: f64) -> RegularizedObjective {
        let params = ScalarizationParams::new(z, e, alpha, DEFAULT_ALPHA_BAR).unwrap();
        RegularizedObjective::new(p, params, Point::from(vec![c])).unwrap()
    }

    #[test]
    fn scalar_prox_step() {
        let p = make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        let r = reg(p, vec![1.0], vec![1.0], 2.0, 1.0);
        let out = solve_subproblem(&r, &InnerOptions::default(), 0).unwrap();
        assert!((out.x_next[0] - 0.5).abs() <= 1e-8, "{out:?}");
        assert!(out.feasible && !out.stalled);
        assert!(out.phi_final <= r.phi_value(r.center()).unwrap());
    }

    #[test]
    fn constrained_pair_step_matches_grid_search() {
        // φ = x² + ½ (x - 2)² on {(x - 1)² ≤ 1}; β = α⟨e, z⟩ = 1 needs α = √2
        let r = reg(pair(), vec![1.0, 0.0], vec![FRAC_1_SQRT_2; 2], std::f64::consts::SQRT_2, 2.0);
        assert!((r.beta() - 1.0).abs() < 1e-12);
        let mut best = (f64::INFINITY, 0.0);
        for k in 0..=20_000_000u64 {
            let x = k as f64 * 1e-7;
            if (x - 1.0) * (x - 1.0) <= 1.0 {
                let v = x * x + 0.5 * (x - 2.0) * (x - 2.0);
                if v < best.0 {
                    best = (v, x);
                }
            }
        }
        assert!((best.1 - 2.0 / 3.0).abs() <= 1e-7);
        let out = solve_subproblem(&r, &InnerOptions::default(), 0).unwrap();
        assert!((out.x_next[0] - best.1).abs() <= 1e-6, "{out:?}");
    }

    #[test]
    fn fixed_point_center() {
        let p = make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        let r = reg(p, vec![1.0], vec![1.0], 3.0, 0.0);
        let out = solve_subproblem(&r, &InnerOptions::default(), 0).unwrap();
        assert_eq!(out.x_next[0], 0.0);
        assert!(out.residual <= 1e-12);
        assert!(out.stalled && out.feasible);
    }

    #[test]
    fn backtrack_decreases_on_strongly_convex() {
        let p = make_convex_quadratic(&[vec![0.0, 0.0].into(), vec![2.0, 1.0].into()]).unwrap();
        let params = ScalarizationParams::uniform(2, 1.0).unwrap();
        let r = RegularizedObjective::new(p, params, Point::from(vec![5.0, -4.0])).unwrap();
        let x = r.center().clone();
        let g = r.phi_subgradient(&x).unwrap();
        let (xn, t) = feasible_backtrack(&r, &x, &g, &InnerOptions::default()).unwrap();
        assert!(t > 0.0);
        assert!(r.phi_value(&xn).unwrap() < r.phi_value(&x).unwrap());
    }

    #[test]
    fn backtrack_at_minimizer_returns_zero_step() {
        let p = make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        let r = reg(p, vec![1.0], vec![1.0], 2.0, 1.0);
        let x = Point::from(vec![0.5]);
        let g = r.phi_subgradient(&x).unwrap();
        let (xn, t) = feasible_backtrack(&r, &x, &g, &InnerOptions::default()).unwrap();
        assert_eq!(t, 0.0);
        assert_eq!(xn, x);
    }

    #[test]
    fn backtrack_shortens_infeasible_steps() {
        // z = (1, 0) at x^k = 2: the full step lands at -2 where F2 = 9 > F2(2) = 1
        let r = reg(pair(), vec![1.0, 0.0], vec![FRAC_1_SQRT_2; 2], 0.1, 2.0);
        let x = r.center().clone();
        let g = r.phi_subgradient(&x).unwrap();
        assert!(!in_level_set(r.base(), &Point::from(vec![x[0] - g[0]]), r.center(), 1e-12).unwrap());
        let (xn, t) = feasible_backtrack(&r, &x, &g, &InnerOptions::default()).unwrap();
        assert_eq!(t, 0.5);
        assert_eq!(xn[0], 0.0);
        assert!(in_level_set(r.base(), &xn, r.center(), 1e-12).unwrap());
    }

    #[test]
    fn every_accepted_trial_is_feasible() {
        let r = reg(pair(), vec![1.0, 0.0], vec![FRAC_1_SQRT_2; 2], 0.05, 2.0);
        let opts = InnerOptions {
            record_trace: true,
            ..InnerOptions::default()
        };
        let out = solve_subproblem(&r, &opts, 4).unwrap();
        assert!(out.accepted.len() > 1);
        for x in &out.accepted {
            assert!(in_level_set(r.base(), x, r.center(), opts.feas_tol).unwrap(), "{x:?}");
        }
        let beta = r.beta();
        let argmin = 2.0 * beta / (2.0 + beta);
        assert!((out.x_next[0] - argmin).abs() < 1e-6, "{out:?}");
        let phis: Vec<f64> = out.accepted.iter().map(|x| r.phi_value(x).unwrap()).collect();
        assert!(phis.windows(2).all(|w| w[1] <= w[0] + 1e-14 * w[0].abs()), "{phis:?}");
    }

    #[test]
    fn invalid_options_rejected() {
        let bad = [
            InnerOptions { armijo_c: 1.0, ..InnerOptions::default() },
            InnerOptions { backtrack_ratio: 0.0, ..InnerOptions::default() },
            InnerOptions { step_init: -1.0, ..InnerOptions::default() },
            InnerOptions { max_inner_iters: 0, ..InnerOptions::default() },
        ];
        for o in bad {
            assert!(o.validate().is_err());
        }
    }

    #[test]
    fn active_constraint_argmin_is_scale_free() {
        let p = crate::library::by_id("quad-tri").unwrap();
        let center = Point::from(vec![2.8619464544016893, 0.7465301406526805]);
        let z = [0.6741062435532374, 0.6263241111638593, 0.7776189592133087];
        let e = vec![0.2520148835762235, 0.8743686852779207, 0.4369690368263557];
        let solve = |scale: f64| {
            let sp = ScalarizationParams::new_unnormalized(z.iter().map(|v| v * scale).collect(), e.clone(), 0.7).unwrap();
            let reg = RegularizedObjective::new(p.clone(), sp, center.clone()).unwrap();
            solve_subproblem(&reg, &InnerOptions::default(), 0).unwrap()
        };
        let base = solve(1.0);
        let f_center = p.evaluate(&center).unwrap();
        let f_next = p.evaluate(&base.x_next).unwrap();
        // the second level-set constraint binds at the solution
        assert!((f_next[1] - f_center[1]).abs() < 1e-10);
        for scale in [2.0, 250.0] {
            let other = solve(scale);
            assert!(dist(&base.x_next, &other.x_next) < 1e-10, "{scale}: {:?} vs {:?}", base.x_next, other.x_next);
        }
    }
}
