// Proximal recursion on `F(x) = x^2`: with `z = e = 1` and `α = 1`, each
// step solves `min x^2 + (1/2)(x - x_k)^2`, so `x_{k+1} = x_k / 3`.

use sppm::driver::{run_sppm, DriverParams, ExpTransform};
use sppm::library::by_id;
use sppm::scalarize::{ScalarizationParams, DEFAULT_ALPHA_BAR};
use sppm::Point;

pub fn run_example() -> sppm::Result<()> {
    let problem = by_id("quad-scalar")?;
    let mut params = DriverParams::new(ScalarizationParams::new(vec![1.0], vec![1.0], 1.0, DEFAULT_ALPHA_BAR)?);
    params.exp_transform = ExpTransform::Off;
    params.stop_on_critical = false;
    params.initial_point = Some(Point::from(vec![1.0]));
    params.max_outer_iters = 12;

    let run = run_sppm(&problem, &params)?;
    let mut expected = 1.0;
    for rec in &run.history {
        let err = (rec.x[0] - expected).abs();
        println!("k={:2}  x={:.12e}  closed form={:.12e}  err={:.1e}", rec.k, rec.x[0], expected, err);
        assert!(err <= 1e-10, "iterate {} off the closed form by {err:e}", rec.k);
        expected /= 3.0;
    }
    println!("termination: {}", run.termination);
    Ok(())
}

#[allow(dead_code)]
fn main() -> sppm::Result<()> {
    run_example()
}
