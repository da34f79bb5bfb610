// Traces the Pareto front of `quad-seg` with one run per weight vector
// `z ∝ (t, 1 - t)` and writes the aggregate table as CSV.

use sppm::driver::{DriverParams, ExpTransform};
use sppm::library::by_id;
use sppm::sweep::{sweep_csv, weight_sweep};
use sppm::Point;

pub fn run_example() -> sppm::Result<()> {
    let problem = by_id("quad-seg")?;
    let mut base = DriverParams::uniform(problem.m())?;
    base.exp_transform = ExpTransform::Off;
    base.initial_point = Some(Point::from(vec![3.0]));

    let points = weight_sweep(&problem, &base, 10, Some(2))?;
    for p in &points {
        let last = p.run.final_iterate();
        println!(
            "t={:.1}  x={:+.6}  F=({:.4}, {:.4})  {}  nondominated={}",
            p.t,
            last.x[0],
            last.f_x[0],
            last.f_x[1],
            p.run.termination,
            p.nondominated
        );
        assert!(last.x[0].abs() <= 1.0 + 1e-6);
    }
    assert!(points.iter().all(|p| p.nondominated));

    let csv = sweep_csv(&points)?;
    println!("{} bytes of CSV, header: {}", csv.len(), String::from_utf8_lossy(&csv).lines().next().unwrap_or(""));
    Ok(())
}

#[allow(dead_code)]
fn main() -> sppm::Result<()> {
    run_example()
}
