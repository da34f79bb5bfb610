use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{ComponentOracle, FnComponent, Point, Problem, ProblemFlags};

/// `F_i(x) = ‖x - c_i‖²`, one objective per center.
///
/// The weak-Pareto set is the convex hull of the centers.
pub fn make_convex_quadratic(centers: &[Point]) -> Result<Problem> {
    let n = centers
        .first()
        .ok_or_else(|| Error::Construction("at least one center is required".into()))?
        .dim();
    if n == 0 {
        return Err(Error::Construction("centers must have dimension >= 1".into()));
    }
    for c in centers {
        if c.dim() != n {
            return Err(Error::Construction("centers must share one dimension".into()));
        }
        crate::problem::check_finite(c)?;
    }
    let components = centers
        .iter()
        .map(|c| {
            let cv = c.to_vec();
            let cg = c.to_vec();
            Arc::new(FnComponent::new(
                move |x: &[f64]| x.iter().zip(&cv).map(|(a, b)| (a - b) * (a - b)).sum(),
                move |x: &[f64]| Some(x.iter().zip(&cg).map(|(a, b)| 2.0 * (a - b)).collect()),
            )) as Arc<dyn ComponentOracle>
        })
        .collect();
    Problem::new(
        format!("quadratic[{}]", centers.len()),
        n,
        components,
        ProblemFlags {
            smooth: true,
            claimed_quasiconvex: true,
            claimed_convex: true,
            positive: false,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_values() {
        let p = make_convex_quadratic(&[vec![1.0].into(), vec![-1.0].into()]).unwrap();
        assert_eq!(p.evaluate(&[0.0]).unwrap().values(), &[1.0, 1.0]);
        assert!(p.is_smooth());
    }

    #[test]
    fn weak_pareto_set_by_dominance_filter() {
        // brute force over a 1e-3 grid on [-3, 3]
        let p = make_convex_quadratic(&[vec![1.0].into(), vec![-1.0].into()]).unwrap();
        let grid: Vec<f64> = (0..=6000).map(|k| -3.0 + k as f64 * 1e-3).collect();
        let vals: Vec<[f64; 2]> = grid
            .iter()
            .map(|&x| {
                let f = p.evaluate(&[x]).unwrap();
                [f[0], f[1]]
            })
            .collect();
        let mut weak = Vec::new();
        for (i, fi) in vals.iter().enumerate() {
            let strictly_dominated = vals.iter().any(|fj| fj[0] < fi[0] && fj[1] < fi[1]);
            if !strictly_dominated {
                weak.push(grid[i]);
            }
        }
        let lo = weak.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = weak.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo + 1.0).abs() <= 1e-3 && (hi - 1.0).abs() <= 1e-3, "[{lo}, {hi}]");
        assert_eq!(weak.len(), 2001);
    }

    #[test]
    fn construction_errors() {
        assert!(make_convex_quadratic(&[]).is_err());
        assert!(make_convex_quadratic(&[vec![0.0].into(), vec![0.0, 1.0].into()]).is_err());
    }
}
