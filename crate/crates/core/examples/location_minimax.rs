// Nonsmooth location problem: each objective is the largest Euclidean
// distance to one cluster of demand points. The run ends at a point where
// no direction decreases both objectives, which the sampled Clarke test
// confirms.

use sppm::criticality::{sampled_pareto_clarke_test, SampledTestOptions};
use sppm::driver::{run_sppm, DriverParams};
use sppm::library::by_id;
use sppm::Point;

pub fn run_example() -> sppm::Result<()> {
    let problem = by_id("loc-2cluster")?;
    println!("{problem:?}");
    let mut params = DriverParams::uniform(problem.m())?;
    params.initial_point = Some(Point::from(vec![3.0, 3.0]));
    params.seed = 7;

    let run = run_sppm(&problem, &params)?;
    let last = run.final_iterate();
    println!(
        "{} after {} iterations at ({:.6}, {:.6}), F = {:?}",
        run.termination,
        run.iterations(),
        last.x[0],
        last.x[1],
        last.f_x.values()
    );

    let opts = SampledTestOptions {
        n_dirs: 256,
        ..SampledTestOptions::default()
    };
    let report = sampled_pareto_clarke_test(&problem, &last.x, &opts, 11)?;
    println!(
        "sampled test over {} directions: smallest worst-case derivative {:.2e} (tol {:.0e}), critical = {}",
        report.n_directions, report.residual, report.crit_tol, report.critical
    );
    assert!(report.critical);
    Ok(())
}

#[allow(dead_code)]
fn main() -> sppm::Result<()> {
    run_example()
}
