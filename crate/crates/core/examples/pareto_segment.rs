// Solves `F(x) = ((x-1)^2, (x+1)^2)` from a point outside the Pareto set
// `[-1, 1]` and inspects the run: criticality, descent and Fejér distances.

use sppm::diagnostics::{descent_report, fejer_report};
use sppm::driver::{run_sppm, DriverParams};
use sppm::library::by_id;
use sppm::Point;

pub fn run_example() -> sppm::Result<()> {
    let problem = by_id("quad-seg")?;
    let mut params = DriverParams::uniform(problem.m())?;
    params.initial_point = Some(Point::from(vec![4.0]));

    let run = run_sppm(&problem, &params)?;
    let last = run.final_iterate();
    println!(
        "{}: {} after {} iterations, x = {:.8}, F = {:?}",
        run.problem_name,
        run.termination,
        run.iterations(),
        last.x[0],
        last.f_x.values()
    );
    assert!(run.termination.is_success());
    assert!(last.x[0] >= -1.0 - 1e-6 && last.x[0] <= 1.0 + 1e-6);

    let crit = &run.final_criticality;
    println!("criticality: {:?} residual {:.2e}, critical = {}", crit.method, crit.residual, crit.critical);

    let descent = descent_report(&run, 1e-10)?;
    println!("descending: {}", descent.descending);
    assert!(descent.descending);

    // every point of the Pareto set works as a Fejér anchor
    for anchor in [-1.0, 0.0, 1.0] {
        let fejer = fejer_report(&run, &[anchor], 1e-8)?;
        println!("fejer to {anchor:+}: monotone = {}, worst rise = {:.1e}", fejer.monotone, fejer.max_violation);
        assert!(fejer.monotone);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> sppm::Result<()> {
    run_example()
}
