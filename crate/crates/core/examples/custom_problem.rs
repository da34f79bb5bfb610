// A user-defined problem built from closures: two smooth quasiconvex,
// nonconvex objectives `(|x - a|^2 + 1)^(1/4)` in the plane. The run is exported to CSV and JSON
// and the JSON is read back bit for bit.

use std::sync::Arc;

use sppm::diagnostics::{export_run, import_run_json, ExportFormat};
use sppm::driver::{run_sppm, DriverParams};
use sppm::problem::{ComponentOracle, FnComponent};
use sppm::{Point, Problem, ProblemFlags};

fn root_distance(a: [f64; 2]) -> Arc<dyn ComponentOracle> {
    let q = move |x: &[f64]| (x[0] - a[0]).powi(2) + (x[1] - a[1]).powi(2) + 1.0;
    Arc::new(FnComponent::new(
        move |x: &[f64]| q(x).powf(0.25),
        move |x: &[f64]| {
            let s = 0.5 * q(x).powf(-0.75);
            Some(vec![s * (x[0] - a[0]), s * (x[1] - a[1])])
        },
    ))
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let flags = ProblemFlags {
        smooth: true,
        claimed_quasiconvex: true,
        positive: true,
        ..ProblemFlags::default()
    };
    let problem = Problem::new("root-distance", 2, vec![root_distance([0.0, 0.0]), root_distance([2.0, 0.0])], flags)?;

    let mut params = DriverParams::uniform(problem.m())?;
    params.initial_point = Some(Point::from(vec![1.0, 2.0]));
    let run = run_sppm(&problem, &params)?;
    let last = run.final_iterate();
    println!(
        "{} after {} iterations at ({:.6}, {:.6})",
        run.termination,
        run.iterations(),
        last.x[0],
        last.x[1]
    );
    assert!(last.x[1].abs() < 1e-3);

    let dir = tempfile::tempdir()?;
    let csv = dir.path().join("run.csv");
    let json = dir.path().join("run.json");
    export_run(&run, ExportFormat::Csv, &csv)?;
    export_run(&run, ExportFormat::Json, &json)?;
    let back = import_run_json(&json)?;
    assert_eq!(back, run);
    println!("exported {} and {}", csv.display(), json.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
