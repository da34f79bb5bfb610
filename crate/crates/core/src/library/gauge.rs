//! Minkowski functionals `γ_C(x) = inf{t > 0 : x ∈ tC}` of compact convex
//! sets with the origin in their interior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm};
use crate::rng;

/// A compact convex set containing the origin in its interior, stored in a
/// form whose gauge has a closed expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GaugeSet {
    /// `{x : ‖x‖ ≤ radius}`
    EuclideanBall { radius: f64 },
    /// `{x : Σ (x_i / axes_i)^2 ≤ 1}`
    Ellipsoid { axes: Vec<f64> },
    /// `{x : ⟨a_j, x⟩ ≤ b_j for all j}` with every `b_j > 0`.
    Polyhedron {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
}

impl GaugeSet {
    pub fn unit_ball() -> Self {
        GaugeSet::EuclideanBall { radius: 1.0 }
    }

    /// Checks shape parameters against ambient dimension `n`.
    ///
    /// Polyhedron boundedness is checked on the coordinate directions and a
    /// fixed set of sampled directions: the gauge must be positive on all of
    /// them.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            GaugeSet::EuclideanBall { radius } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::Construction(format!(
                        "ball radius must be positive, got {radius}"
                    )));
                }
            }
            GaugeSet::Ellipsoid { axes } => {
                if axes.len() != n {
                    return Err(Error::Construction(format!(
                        "ellipsoid needs {n} axes, got {}",
                        axes.len()
                    )));
                }
                if axes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
                    return Err(Error::Construction("ellipsoid axes must be positive".into()));
                }
            }
            GaugeSet::Polyhedron { normals, offsets } => {
                if normals.is_empty() || normals.len() != offsets.len() {
                    return Err(Error::Construction(
                        "polyhedron needs matching, nonempty normals and offsets".into(),
                    ));
                }
                if normals.iter().any(|a| a.len() != n) {
                    return Err(Error::Construction(format!(
                        "polyhedron normals must have dimension {n}"
                    )));
                }
                if offsets.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
                    return Err(Error::Construction(
                        "polyhedron offsets must be positive (origin in the interior)".into(),
                    ));
                }
                let mut probes: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 256);
                for i in 0..n {
                    for s in [1.0, -1.0] {
                        let mut e = vec![0.0; n];
                        e[i] = s;
                        probes.push(e);
                    }
                }
                let mut stream = rng::stream(0x6A09_E667, 0, n as u64);
                probes.extend((0..256).map(|_| rng::unit_direction(&mut stream, n)));
                if probes.iter().any(|u| self.value(u) <= 1e-12) {
                    return Err(Error::Construction("polyhedron is unbounded".into()));
                }
            }
        }
        Ok(())
    }

    /// `γ_C(x)`
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            GaugeSet::EuclideanBall { radius } => norm(x) / radius,
            GaugeSet::Ellipsoid { axes } => x
                .iter()
                .zip(axes)
                .map(|(v, a)| (v / a) * (v / a))
                .sum::<f64>()
                .sqrt(),
            GaugeSet::Polyhedron { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .map(|(a, b)| dot(a, x) / b)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// A subgradient of `γ_C` at `x`. At the origin the ball and ellipsoid
    /// return `0`; the polyhedron returns the first facet normal scaled by its
    /// offset, which lies in the polar set.
    pub fn subgradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            GaugeSet::EuclideanBall { radius } => {
                let r = norm(x);
                if r == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    x.iter().map(|v| v / (r * radius)).collect()
                }
            }
            GaugeSet::Ellipsoid { axes } => {
                let g = self.value(x);
                if g == 0.0 {
                    vec![0.0; x.len()]
                } else {
                    x.iter().zip(axes).map(|(v, a)| v / (a * a * g)).collect()
                }
            }
            GaugeSet::Polyhedron { normals, offsets } => {
                let mut best = 0;
                let mut best_val = f64::NEG_INFINITY;
                for (j, (a, b)) in normals.iter().zip(offsets).enumerate() {
                    let v = dot(a, x) / b;
                    if v > best_val {
                        best_val = v;
                        best = j;
                    }
                }
                normals[best].iter().map(|v| v / offsets[best]).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn linf_box() -> GaugeSet {
        GaugeSet::Polyhedron {
            normals: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            offsets: vec![1.0; 4],
        }
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(GaugeSet::unit_ball().value(&[3.0, 4.0]), 5.0);
        let ell = GaugeSet::Ellipsoid { axes: vec![2.0, 1.0] };
        assert_relative_eq!(ell.value(&[2.0, 0.0]), 1.0);
        assert_relative_eq!(linf_box().value(&[0.5, -2.0]), 2.0);
    }

    #[test]
    fn validation() {
        assert!(linf_box().validate(2).is_ok());
        let half_plane = GaugeSet::Polyhedron {
            normals: vec![vec![1.0, 0.0]],
            offsets: vec![1.0],
        };
        assert!(half_plane.validate(2).is_err());
        let bad_offset = GaugeSet::Polyhedron {
            normals: vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            offsets: vec![1.0, 0.0],
        };
        assert!(bad_offset.validate(2).is_err());
        assert!(GaugeSet::Ellipsoid { axes: vec![1.0] }.validate(2).is_err());
        assert!(GaugeSet::EuclideanBall { radius: -1.0 }.validate(2).is_err());
    }

    #[test]
    fn subgradients_match_central_differences() {
        let gauges = [
            GaugeSet::unit_ball(),
            GaugeSet::Ellipsoid { axes: vec![2.0, 0.5] },
            linf_box(),
        ];
        let x = [0.37, -0.81];
        let h = 1e-6;
        for g in &gauges {
            let sg = g.subgradient(&x);
            for k in 0..2 {
                let mut p = x;
                let mut m = x;
                p[k] += h;
                m[k] -= h;
                let fd = (g.value(&p) - g.value(&m)) / (2.0 * h);
                assert!((fd - sg[k]).abs() < 1e-6, "{g:?} k={k}: {fd} vs {}", sg[k]);
            }
        }
    }

    proptest! {
        #[test]
        fn ball_gauge_is_euclidean_norm(x in prop::collection::vec(-50.0f64..50.0, 1..6)) {
            let g = GaugeSet::unit_ball().value(&x);
            prop_assert!((g - norm(&x)).abs() <= 1e-12 * (1.0 + norm(&x)));
        }

        #[test]
        fn positive_homogeneity(
            x in prop::collection::vec(-10.0f64..10.0, 2),
            t in 0.0f64..20.0,
        ) {
            let scaled: Vec<f64> = x.iter().map(|v| v * t).collect();
            for g in [GaugeSet::unit_ball(), GaugeSet::Ellipsoid { axes: vec![3.0, 0.5] }, linf_box()] {
                let lhs = g.value(&scaled);
                let rhs = t * g.value(&x);
                prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
            }
        }
    }
}
