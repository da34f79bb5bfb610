//! Test models with known structure: convex quadratics, demand-theory
//! utilities and gauge-distance location problems, plus a catalog addressable
//! by string id.

mod demand;
mod gauge;
mod location;
mod quadratic;

use rand::Rng;

pub use demand::{
    make_ces, make_ces_with_budget, make_cobb_douglas, make_cobb_douglas_with_budget, Budget, Ces,
    CobbDouglas,
};
pub use gauge::GaugeSet;
pub use location::{make_location, ClusterSpec, Composition};
pub use quadratic::make_convex_quadratic;

use crate::error::{Error, Result};
use crate::problem::{Point, Problem};
use crate::rng;

struct CatalogEntry {
    id: &'static str,
    summary: &'static str,
    build: fn() -> Result<Problem>,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: "quad-scalar",
        summary: "F(x) = x^2 on R (m=1, n=1), smooth convex",
        build: || make_convex_quadratic(&[vec![0.0].into()]),
    },
    CatalogEntry {
        id: "quad-seg",
        summary: "F(x) = ((x-1)^2, (x+1)^2) on R; weak-Pareto set [-1, 1]",
        build: || make_convex_quadratic(&[vec![1.0].into(), vec![-1.0].into()]),
    },
    CatalogEntry {
        id: "quad-tri",
        summary: "squared distances to (0,0), (2,0), (0,2) in R^2 (m=3)",
        build: || {
            make_convex_quadratic(&[
                vec![0.0, 0.0].into(),
                vec![2.0, 0.0].into(),
                vec![0.0, 2.0].into(),
            ])
        },
    },
    CatalogEntry {
        id: "cobb2",
        summary: "two negated Cobb-Douglas utilities (1,0.3,0.7), (1,0.7,0.3) under budget x1+x2 <= 4",
        build: || {
            make_cobb_douglas_with_budget(
                &[CobbDouglas::new(1.0, 0.3, 0.7), CobbDouglas::new(1.0, 0.7, 0.3)],
                Some(demand_budget()),
            )
        },
    },
    CatalogEntry {
        id: "ces1",
        summary: "one negated CES utility (0.5, 0.5, rho=-1) under budget x1+x2 <= 4",
        build: || make_ces_with_budget(&[Ces::new(0.5, 0.5, -1.0)], Some(demand_budget())),
    },
    CatalogEntry {
        id: "loc-2cluster",
        summary: "two clusters {(0,0), (1,0)}: Euclidean max-distance and squared ellipsoidal max-distance; common minimizer (0.5, 0)",
        build: || {
            let pts = vec![Point::from(vec![0.0, 0.0]), Point::from(vec![1.0, 0.0])];
            make_location(&[
                ClusterSpec::euclidean(pts.clone()),
                ClusterSpec {
                    demand_points: pts,
                    gauges: vec![GaugeSet::Ellipsoid { axes: vec![1.0, 2.0] }; 2],
                    compositions: vec![Composition::Power { q: 2.0 }; 2],
                },
            ])
        },
    },
    CatalogEntry {
        id: "loc-poly",
        summary: "polyhedral (box) max-distance to {(0,0),(2,0),(1,2)} and ellipsoidal distances to {(3,1),(2,3)}",
        build: || {
            let box_gauge = GaugeSet::Polyhedron {
                normals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
                offsets: vec![1.0; 4],
            };
            make_location(&[
                ClusterSpec {
                    demand_points: vec![
                        vec![0.0, 0.0].into(),
                        vec![2.0, 0.0].into(),
                        vec![1.0, 2.0].into(),
                    ],
                    gauges: vec![box_gauge; 3],
                    compositions: vec![Composition::Identity; 3],
                },
                ClusterSpec {
                    demand_points: vec![vec![3.0, 1.0].into(), vec![2.0, 3.0].into()],
                    gauges: vec![GaugeSet::Ellipsoid { axes: vec![1.0, 2.0] }; 2],
                    compositions: vec![
                        Composition::Affine {
                            weights: vec![0.5, 0.5],
                            offset: 0.0,
                        },
                        Composition::Identity,
                    ],
                },
            ])
        },
    },
];

fn demand_budget() -> Budget {
    Budget {
        prices: [1.0, 1.0],
        income: 4.0,
        slope: 1.0,
    }
}

/// Ids accepted by [`by_id`], in catalog order.
pub fn catalog_ids() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.id).collect()
}

/// `(id, one-line description)` pairs.
pub fn catalog() -> Vec<(&'static str, &'static str)> {
    CATALOG.iter().map(|e| (e.id, e.summary)).collect()
}

/// Builds the catalog problem `id`; the problem is named after its id.
pub fn by_id(id: &str) -> Result<Problem> {
    let entry = CATALOG
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownProblem(id.to_string()))?;
    Ok((entry.build)()?.with_name(entry.id))
}

/// Outcome of [`sample_quasiconvexity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiconvexitySample {
    pub triples: usize,
    pub violations: usize,
    /// Largest `F_i(tx + (1-t)y) - max(F_i(x), F_i(y))` seen.
    pub worst_excess: f64,
}

/// Samples `F_i(tx + (1-t)y) ≤ max(F_i(x), F_i(y)) + tol` on `triples`
/// random `(x, y, t)` with `x, y` uniform in `[-half_width, half_width]^n`.
pub fn sample_quasiconvexity(
    problem: &Problem,
    i: usize,
    triples: usize,
    half_width: f64,
    tol: f64,
    seed: u64,
) -> Result<QuasiconvexitySample> {
    let n = problem.n();
    let mut stream = rng::stream(seed, 0x99, i as u64);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..triples {
        let x: Vec<f64> = (0..n).map(|_| stream.random_range(-half_width..=half_width)).collect();
        let y: Vec<f64> = (0..n).map(|_| stream.random_range(-half_width..=half_width)).collect();
        let t: f64 = stream.random();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let excess = problem.component_value(i, &mid)?
            - problem.component_value(i, &x)?.max(problem.component_value(i, &y)?);
        if excess > tol {
            violations += 1;
        }
        worst = worst.max(excess);
    }
    Ok(QuasiconvexitySample {
        triples,
        violations,
        worst_excess: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_builds() {
        let ids = catalog_ids();
        assert!(ids.len() >= 6);
        for id in ids {
            let p = by_id(id).unwrap();
            assert_eq!(p.name(), id);
            assert!(p.flags().claimed_quasiconvex);
        }
        assert!(matches!(by_id("nope"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn cobb_douglas_is_quasiconvex_on_positive_orthant() {
        // restricted to the open orthant, shifted so every sample is interior
        let p = make_cobb_douglas(&[CobbDouglas::new(1.0, 0.5, 0.5)]).unwrap();
        let mut stream = rng::stream(5, 0, 0);
        for _ in 0..10_000 {
            let x = [stream.random_range(0.01..10.0), stream.random_range(0.01..10.0)];
            let y = [stream.random_range(0.01..10.0), stream.random_range(0.01..10.0)];
            let t: f64 = stream.random();
            let mid = [t * x[0] + (1.0 - t) * y[0], t * x[1] + (1.0 - t) * y[1]];
            let lhs = p.component_value(0, &mid).unwrap();
            let rhs = p.component_value(0, &x).unwrap().max(p.component_value(0, &y).unwrap());
            assert!(lhs <= rhs + 1e-10);
        }
    }

    #[test]
    fn extended_problems_are_quasiconvex_by_sampling() {
        let problems = [
            make_cobb_douglas(&[CobbDouglas::new(2.0, 0.4, 1.3)]).unwrap(),
            make_ces(&[Ces::new(0.3, 0.7, -2.0)]).unwrap(),
            make_ces(&[Ces::new(0.6, 0.4, -0.5)]).unwrap(),
        ];
        for p in &problems {
            let s = sample_quasiconvexity(p, 0, 10_000, 5.0, 1e-10, 17).unwrap();
            assert_eq!(s.violations, 0, "{p:?}: {s:?}");
        }
    }

    #[test]
    fn unflagged_ces_fails_sampling() {
        for rho in [3.0, 0.5] {
            let p = make_ces(&[Ces::new(0.5, 0.5, rho)]).unwrap();
            assert!(!p.flags().claimed_quasiconvex);
            let s = sample_quasiconvexity(&p, 0, 10_000, 5.0, 1e-10, 17).unwrap();
            assert!(s.violations > 0, "rho = {rho}");
        }
    }
}
