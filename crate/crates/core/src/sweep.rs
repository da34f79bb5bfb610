//! Fixed-weight runs across a grid of bi-objective weights, used to trace a
//! Pareto front one run at a time.
//!
//! Weight `t ∈ {0, 1/grid, …, 1}` gives `z ∝ (t, 1 − t)`, with `t` clipped to
//! `[ε, 1 − ε]` so neither weight is exactly zero. Runs execute in parallel
//! and results come back in grid order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::diagnostics::{csv_bytes, format_f64};
use crate::driver::{run_sppm, DriverParams, ParamsSchedule, RunRecord};
use crate::error::{Error, Result};
use crate::order::nondominated_mask;
use crate::problem::Problem;
use crate::scalarize::ScalarizationParams;

/// Clipping applied to the grid endpoints.
pub const SWEEP_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub t: f64,
    pub z: Vec<f64>,
    pub run: RunRecord,
    /// No other final point of the sweep dominates this one.
    pub nondominated: bool,
}

/// Grid index, grid value, weights and run of one sweep member.
type Solved = (usize, f64, Vec<f64>, RunRecord);

/// Unit weight vector for grid value `t`.
pub fn sweep_weights(t: f64) -> Vec<f64> {
    let t = t.clamp(SWEEP_EPS, 1.0 - SWEEP_EPS);
    let r = t.hypot(1.0 - t);
    vec![t / r, (1.0 - t) / r]
}

/// One run per grid weight, sharing every other setting of `base`
/// (`e` and `α` come from its first scheduled triple). `jobs` bounds the
/// number of worker threads; `None` uses the global pool.
pub fn weight_sweep(problem: &Problem, base: &DriverParams, grid: usize, jobs: Option<usize>) -> Result<Vec<SweepPoint>> {
    if grid < 2 {
        return Err(Error::InvalidParams(format!("sweep grid must be at least 2, got {grid}")));
    }
    if problem.m() != 2 {
        return Err(Error::Unsupported(format!(
            "weight sweeps need exactly 2 objectives, `{}` has {}",
            problem.name(),
            problem.m()
        )));
    }
    let template = base.schedule.at(0);
    let configs = (0..=grid)
        .map(|i| {
            let t = i as f64 / grid as f64;
            let z = sweep_weights(t);
            let sp = ScalarizationParams::new(z.clone(), template.e.clone(), template.alpha, base.alpha_bar)?;
            let mut p = base.clone();
            p.schedule = ParamsSchedule::Constant(sp);
            Ok((i, t, z, p))
        })
        .collect::<Result<Vec<_>>>()?;

    let solve = || -> Result<Vec<Solved>> {
        configs
            .into_par_iter()
            .map(|(i, t, z, p)| run_sppm(problem, &p).map(|run| (i, t, z, run)))
            .collect()
    };
    let runs = match jobs {
        Some(0) => return Err(Error::InvalidParams("jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::InvalidParams(format!("cannot start {j} worker threads: {e}")))?
            .install(solve)?,
        None => solve()?,
    };

    let finals: Vec<_> = runs.iter().map(|r| r.3.final_iterate().f_x.clone()).collect();
    let mask = nondominated_mask(&finals)?;
    Ok(runs
        .into_iter()
        .zip(mask)
        .map(|((index, t, z, run), nondominated)| SweepPoint {
            index,
            t,
            z,
            run,
            nondominated,
        })
        .collect())
}

/// Aggregate table: one row per weight with the final point and its flag.
pub fn sweep_csv(points: &[SweepPoint]) -> Result<Vec<u8>> {
    let (n, m) = points
        .first()
        .map(|p| (p.run.final_iterate().x.dim(), p.run.final_iterate().f_x.len()))
        .unwrap_or((0, 0));
    let mut header: Vec<String> = ["index", "t", "z_1", "z_2", "termination", "iterations"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=m).map(|i| format!("F_{i}")));
    header.push("nondominated".into());

    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let last = p.run.final_iterate();
            let mut row = vec![p.index.to_string(), format_f64(p.t)];
            row.extend(p.z.iter().map(|v| format_f64(*v)));
            row.push(p.run.termination.to_string());
            row.push(p.run.iterations().to_string());
            row.extend(last.x.iter().map(|v| format_f64(*v)));
            row.extend(last.f_x.iter().map(|v| format_f64(*v)));
            row.push(p.nondominated.to_string());
            row
        })
        .collect();
    csv_bytes(&header, &rows, Path::new("<sweep>"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::by_id;
    use crate::problem::Point;

    #[test]
    fn weights_are_clipped_unit_vectors() {
        for t in [0.0, 0.3, 1.0] {
            let z = sweep_weights(t);
            assert!(z.iter().all(|v| *v > 0.0));
            assert!((z[0].hypot(z[1]) - 1.0).abs() < 1e-15);
        }
        let z = sweep_weights(0.5);
        assert!((z[0] - z[1]).abs() < 1e-15);
    }

    #[test]
    fn argument_errors() {
        let p = by_id("quad-seg").unwrap();
        let base = DriverParams::uniform(2).unwrap();
        assert!(matches!(weight_sweep(&p, &base, 1, None), Err(Error::InvalidParams(_))));
        assert!(matches!(weight_sweep(&p, &base, 4, Some(0)), Err(Error::InvalidParams(_))));
        let tri = by_id("quad-tri").unwrap();
        let base3 = DriverParams::uniform(3).unwrap();
        assert!(matches!(weight_sweep(&tri, &base3, 4, None), Err(Error::Unsupported(_))));
    }

    #[test]
    fn small_sweep_is_ordered_and_nondominated() {
        let p = by_id("quad-seg").unwrap();
        let mut base = DriverParams::uniform(2).unwrap();
        base.initial_point = Some(Point::from(vec![3.0]));
        let pts = weight_sweep(&p, &base, 4, Some(2)).unwrap();
        assert_eq!(pts.len(), 5);
        assert!(pts.iter().enumerate().all(|(i, s)| s.index == i));
        assert!(pts.iter().all(|s| s.nondominated));
        let text = String::from_utf8(sweep_csv(&pts).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 6);
        assert!(text.starts_with("index,t,z_1,z_2,termination,iterations,x_1,F_1,F_2,nondominated\n"));
    }
}
