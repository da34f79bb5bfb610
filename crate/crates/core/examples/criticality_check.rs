// Pareto-criticality tests without running the solver: the smooth min-norm
// test on `quad-tri`, and the descent witness it returns at a non-critical
// point, verified with a line probe.

use sppm::criticality::{check_criticality, line_probe_descent, CriticalityOptions};
use sppm::library::by_id;

pub fn run_example() -> sppm::Result<()> {
    let problem = by_id("quad-tri")?;
    let opts = CriticalityOptions::default();

    // inside the triangle spanned by the three centers
    let inside = [0.5, 0.5];
    let r = check_criticality(&problem, &inside, &opts, 0)?;
    println!("{inside:?}: {:?} residual {:.2e}, critical = {}", r.method, r.residual, r.critical);
    assert!(r.critical);

    let outside = [3.0, 3.0];
    let r = check_criticality(&problem, &outside, &opts, 0)?;
    println!("{outside:?}: residual {:.3}, critical = {}", r.residual, r.critical);
    assert!(!r.critical);
    let d = r.witness_direction.expect("a failed test carries a witness");
    let step = line_probe_descent(&problem, &outside, &d)?;
    println!("witness {:?} decreases every objective at step {step:?}", d.coords());
    assert!(step.is_some());
    Ok(())
}

#[allow(dead_code)]
fn main() -> sppm::Result<()> {
    run_example()
}
