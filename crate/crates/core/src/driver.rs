//! The outer SPPM loop.
//!
//! Iterate `k` builds `φ_k(x) = ⟨F(x), z_k⟩ + (β_k/2)‖x − x^k‖²`, asks the
//! inner solver for a point of `Ω_k` with lower `φ_k`, and stops when the
//! step is below `step_tol`, when a stop candidate passes the criticality
//! test, or when the iteration budget runs out.
//!
//! With the exponential transform on, the loop runs on `e^F`. That changes
//! neither the level sets nor the Pareto sets, and the history always stores
//! the objective values of the problem as given.

use serde::{Deserialize, Serialize};

use crate::criticality::{check_criticality, CriticalityOptions, CriticalityReport};
use crate::error::{Error, Result};
use crate::inner::{solve_subproblem, InnerOptions};
use crate::linalg::dist;
use crate::order::ObjectiveVector;
use crate::problem::{Point, Problem};
use crate::rng::{self, tags};
use crate::scalarize::{RegularizedObjective, ScalarizationParams, DEFAULT_ALPHA_BAR};

/// Half-width of the box `[-5, 5]^n` the default initial point is drawn from.
pub const INITIAL_BOX: f64 = 5.0;

/// Criticality is checked once the step drops to this multiple of `step_tol`.
pub const CANDIDATE_FACTOR: f64 = 10.0;

/// Hypothesis the convergence theory needs but no finite test can confirm.
pub const ASSUMED_COMPLETENESS: &str =
    "completeness: every sequence with F(x^(k+1)) ⪯ F(x^k) is bounded below in objective space by some F(y)";

/// `(z_k, e_k, α_k)` for each outer iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "params")]
pub enum ParamsSchedule {
    Constant(ScalarizationParams),
    /// Entry `k` is used at iteration `k`; the last entry repeats.
    Sequence(Vec<ScalarizationParams>),
}

impl ParamsSchedule {
    pub fn at(&self, k: usize) -> &ScalarizationParams {
        match self {
            ParamsSchedule::Constant(p) => p,
            ParamsSchedule::Sequence(seq) => &seq[k.min(seq.len() - 1)],
        }
    }

    fn entries(&self) -> &[ScalarizationParams] {
        match self {
            ParamsSchedule::Constant(p) => std::slice::from_ref(p),
            ParamsSchedule::Sequence(seq) => seq,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpTransform {
    /// On exactly when the problem is not flagged positive.
    #[default]
    Auto,
    On,
    Off,
}

impl ExpTransform {
    pub fn applies_to(self, problem: &Problem) -> bool {
        match self {
            ExpTransform::Auto => !problem.flags().positive,
            ExpTransform::On => true,
            ExpTransform::Off => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverParams {
    pub max_outer_iters: usize,
    pub step_tol: f64,
    pub schedule: ParamsSchedule,
    pub inner: InnerOptions,
    pub exp_transform: ExpTransform,
    pub seed: u64,
    /// Drawn uniformly from `[-5, 5]^n` with `seed` when absent.
    pub initial_point: Option<Point>,
    pub alpha_bar: f64,
    pub criticality: CriticalityOptions,
    /// Stop as soon as a stop candidate passes the criticality test. When
    /// off, only `step_tol` and the budget end the run.
    #[serde(default = "default_true")]
    pub stop_on_critical: bool,
}

fn default_true() -> bool {
    true
}

impl DriverParams {
    /// Defaults around a constant parameter triple.
    pub fn new(params: ScalarizationParams) -> Self {
        Self {
            max_outer_iters: 500,
            step_tol: 1e-6,
            schedule: ParamsSchedule::Constant(params),
            inner: InnerOptions::default(),
            exp_transform: ExpTransform::Auto,
            seed: 0,
            initial_point: None,
            alpha_bar: DEFAULT_ALPHA_BAR,
            criticality: CriticalityOptions::default(),
            stop_on_critical: true,
        }
    }

    /// Uniform `z = e = (1/√m, …)` and `α = 1`.
    pub fn uniform(m: usize) -> Result<Self> {
        Ok(Self::new(ScalarizationParams::uniform(m, 1.0)?))
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidParams("max_outer_iters must be at least 1".into()));
        }
        if !(self.step_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "step_tol must be positive, got {}",
                self.step_tol
            )));
        }
        let entries = self.schedule.entries();
        if entries.is_empty() {
            return Err(Error::InvalidParams("parameter schedule is empty".into()));
        }
        for p in entries {
            ScalarizationParams::new(p.z.clone(), p.e.clone(), p.alpha, self.alpha_bar)?;
            if p.m() != m {
                return Err(Error::Dimension {
                    expected: m,
                    found: p.m(),
                });
            }
        }
        self.inner.validate()
    }
}

/// State after outer iteration `k`. The step fields describe the step that
/// produced `x`; they are zero for `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateRecord {
    pub k: usize,
    pub x: Point,
    #[serde(rename = "F_x")]
    pub f_x: ObjectiveVector,
    pub step_norm: f64,
    pub beta: f64,
    pub inner_residual: f64,
    pub inner_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    StepTol,
    Critical,
    MaxIters,
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::StepTol => "step-tol",
            Termination::Critical => "critical",
            Termination::MaxIters => "max-iters",
            Termination::Stalled => "stalled",
        }
    }

    /// Whether the run ended on a convergence test rather than a failure.
    pub fn is_success(self) -> bool {
        matches!(self, Termination::StepTol | Termination::Critical)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub exp_transform_applied: bool,
    pub assumed_hypotheses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem_name: String,
    pub params: DriverParams,
    pub history: Vec<IterateRecord>,
    pub termination: Termination,
    pub final_criticality: CriticalityReport,
    pub metadata: RunMetadata,
}

impl RunRecord {
    pub fn final_iterate(&self) -> &IterateRecord {
        self.history.last().expect("history is never empty")
    }

    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

/// Stop test for one outer step. A step of at most `step_tol` wins over a
/// passing criticality report.
pub fn check_stop(prev: &[f64], next: &[f64], step_tol: f64, crit: Option<&CriticalityReport>) -> Option<Termination> {
    if dist(prev, next) <= step_tol {
        Some(Termination::StepTol)
    } else if crit.is_some_and(|c| c.critical) {
        Some(Termination::Critical)
    } else {
        None
    }
}

fn initial_point(problem: &Problem, params: &DriverParams) -> Result<Point> {
    match &params.initial_point {
        Some(p) if p.dim() != problem.n() => Err(Error::Dimension {
            expected: problem.n(),
            found: p.dim(),
        }),
        Some(p) => Ok(p.clone()),
        None => {
            use rand::Rng;
            let mut stream = rng::stream(params.seed, tags::INITIAL_POINT, 0);
            Ok(Point::from(
                (0..problem.n())
                    .map(|_| stream.random_range(-INITIAL_BOX..=INITIAL_BOX))
                    .collect::<Vec<_>>(),
            ))
        }
    }
}

/// Runs SPPM on `problem`. The input problem is not modified.
pub fn run_sppm(problem: &Problem, params: &DriverParams) -> Result<RunRecord> {
    params.validate(problem.m())?;
    let transformed = params.exp_transform.applies_to(problem);
    let work = if transformed {
        problem.exp_transform()
    } else {
        problem.clone()
    };

    let mut x = initial_point(problem, params)?;
    work.evaluate(&x)?;
    let mut history = vec![IterateRecord {
        k: 0,
        x: x.clone(),
        f_x: problem.evaluate(&x)?,
        step_norm: 0.0,
        beta: 0.0,
        inner_residual: 0.0,
        inner_iters: 0,
    }];

    let crit_seed = |k: usize| rng::substream_seed(params.seed, tags::CRIT_DIRS, k as u64);
    let mut last_crit: Option<(usize, CriticalityReport)> = None;
    let mut termination = Termination::MaxIters;

    for k in 0..params.max_outer_iters {
        let sp = params.schedule.at(k).clone();
        let reg = RegularizedObjective::new(work.clone(), sp, x.clone())?;
        let inner = solve_subproblem(&reg, &params.inner, rng::substream_seed(params.seed, tags::OUTER_ITER, k as u64))?;

        if inner.stalled {
            // x^(k+1) = x^k: the step-tol branch, provided x^k passes the criticality test
            history.push(IterateRecord {
                k: k + 1,
                x: x.clone(),
                f_x: history[history.len() - 1].f_x.clone(),
                step_norm: 0.0,
                beta: reg.beta(),
                inner_residual: inner.residual,
                inner_iters: inner.inner_iters,
            });
            let crit = check_criticality(problem, &x, &params.criticality, crit_seed(k + 1))?;
            termination = if crit.critical {
                Termination::StepTol
            } else {
                Termination::Stalled
            };
            last_crit = Some((history.len() - 1, crit));
            break;
        }

        let step = dist(&inner.x_next, &x);
        let next = inner.x_next;
        history.push(IterateRecord {
            k: k + 1,
            x: next.clone(),
            f_x: problem.evaluate(&next)?,
            step_norm: step,
            beta: reg.beta(),
            inner_residual: inner.residual,
            inner_iters: inner.inner_iters,
        });
        let crit = if step <= CANDIDATE_FACTOR * params.step_tol {
            let c = check_criticality(problem, &next, &params.criticality, crit_seed(k + 1))?;
            last_crit = Some((history.len() - 1, c.clone()));
            Some(c)
        } else {
            None
        };
        let prev = std::mem::replace(&mut x, next);
        let crit = crit.filter(|_| params.stop_on_critical);
        if let Some(t) = check_stop(&prev, &x, params.step_tol, crit.as_ref()) {
            termination = t;
            break;
        }
    }

    let last = history.len() - 1;
    let final_criticality = match last_crit {
        Some((idx, c)) if idx == last => c,
        _ => check_criticality(problem, &x, &params.criticality, crit_seed(last))?,
    };

    Ok(RunRecord {
        problem_name: problem.name().to_string(),
        params: params.clone(),
        history,
        termination,
        final_criticality,
        metadata: RunMetadata {
            exp_transform_applied: transformed,
            assumed_hypotheses: vec![ASSUMED_COMPLETENESS.to_string()],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criticality::CritMethod;
    use crate::library::{by_id, make_convex_quadratic};

    fn report(critical: bool) -> CriticalityReport {
        CriticalityReport {
            residual: 0.0,
            method: CritMethod::SmoothQp,
            witness_direction: None,
            n_directions: 0,
            critical,
            crit_tol: 1e-5,
        }
    }

    #[test]
    fn check_stop_examples() {
        assert_eq!(check_stop(&[1.0], &[1.0], 1e-6, None), Some(Termination::StepTol));
        assert_eq!(check_stop(&[0.0], &[1.0], 1e-6, None), None);
        assert_eq!(check_stop(&[0.0], &[1.0], 1e-6, Some(&report(false))), None);
        assert_eq!(
            check_stop(&[0.0], &[1.0], 1e-6, Some(&report(true))),
            Some(Termination::Critical)
        );
        assert_eq!(
            check_stop(&[0.0], &[0.0], 1e-6, Some(&report(true))),
            Some(Termination::StepTol)
        );
    }

    fn scalar_params() -> DriverParams {
        let mut p = DriverParams::new(ScalarizationParams::new(vec![1.0], vec![1.0], 1.0, DEFAULT_ALPHA_BAR).unwrap());
        p.exp_transform = ExpTransform::Off;
        p.initial_point = Some(Point::from(vec![1.0]));
        p
    }

    #[test]
    fn scalar_prox_recursion() {
        let problem = make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        let mut params = scalar_params();
        params.max_outer_iters = 20;
        params.step_tol = 1e-300;
        let run = run_sppm(&problem, &params).unwrap();
        assert_eq!(run.history.len(), 21);
        for rec in &run.history {
            let expected = 3f64.powi(-(rec.k as i32));
            assert!((rec.x[0] - expected).abs() <= 1e-10, "k = {}: {}", rec.k, rec.x[0]);
        }
        assert_eq!(run.termination, Termination::MaxIters);
    }

    #[test]
    fn pair_converges_into_segment() {
        let problem = by_id("quad-seg").unwrap();
        let mut params = DriverParams::uniform(2).unwrap();
        params.initial_point = Some(Point::from(vec![3.0]));
        let run = run_sppm(&problem, &params).unwrap();
        assert!(run.termination.is_success(), "{:?}", run.termination);
        let x = run.final_iterate().x[0];
        assert!((-1.0 - 1e-3..=1.0 + 1e-3).contains(&x), "{x}");
        assert!(run.final_criticality.residual <= 1e-5);
        assert!(run.metadata.exp_transform_applied);
    }

    #[test]
    fn critical_start_stops_immediately() {
        let problem = by_id("loc-2cluster").unwrap();
        let mut params = DriverParams::uniform(2).unwrap();
        params.initial_point = Some(Point::from(vec![0.5, 0.0]));
        let run = run_sppm(&problem, &params).unwrap();
        assert!(run.iterations() <= 1, "{}", run.iterations());
        assert!(run.termination.is_success(), "{:?}", run.termination);
        assert!(run.final_criticality.critical);
    }

    #[test]
    fn history_records_untransformed_values() {
        let problem = by_id("quad-seg").unwrap();
        let mut params = DriverParams::uniform(2).unwrap();
        params.exp_transform = ExpTransform::On;
        params.initial_point = Some(Point::from(vec![2.0]));
        let run = run_sppm(&problem, &params).unwrap();
        for rec in &run.history {
            assert_eq!(rec.f_x, problem.evaluate(&rec.x).unwrap());
        }
    }

    #[test]
    fn default_initial_point_is_seeded() {
        let problem = by_id("quad-tri").unwrap();
        let mut params = DriverParams::uniform(3).unwrap();
        params.seed = 11;
        params.max_outer_iters = 1;
        let a = run_sppm(&problem, &params).unwrap();
        let b = run_sppm(&problem, &params).unwrap();
        assert_eq!(a.history[0].x, b.history[0].x);
        assert!(a.history[0].x.iter().all(|v| v.abs() <= INITIAL_BOX));
        params.seed = 12;
        let c = run_sppm(&problem, &params).unwrap();
        assert_ne!(a.history[0].x, c.history[0].x);
    }

    #[test]
    fn invalid_params_rejected() {
        let problem = by_id("quad-seg").unwrap();
        let base = DriverParams::uniform(2).unwrap();

        let mut p = base.clone();
        p.max_outer_iters = 0;
        assert!(run_sppm(&problem, &p).is_err());

        let mut p = base.clone();
        p.step_tol = 0.0;
        assert!(run_sppm(&problem, &p).is_err());

        let mut p = base.clone();
        p.alpha_bar = 0.5;
        let err = run_sppm(&problem, &p).unwrap_err().to_string();
        assert!(err.contains("0 < α_k < ᾱ"), "{err}");

        let mut p = base.clone();
        p.initial_point = Some(Point::from(vec![0.0, 0.0]));
        assert!(matches!(run_sppm(&problem, &p), Err(Error::Dimension { .. })));

        assert!(matches!(run_sppm(&by_id("quad-tri").unwrap(), &base), Err(Error::Dimension { .. })));
    }

    #[test]
    fn sequence_schedule_repeats_last_entry() {
        let a = ScalarizationParams::uniform(2, 1.0).unwrap();
        let b = ScalarizationParams::uniform(2, 2.0).unwrap();
        let s = ParamsSchedule::Sequence(vec![a.clone(), b.clone()]);
        assert_eq!(s.at(0), &a);
        assert_eq!(s.at(1), &b);
        assert_eq!(s.at(50), &b);
    }
}
