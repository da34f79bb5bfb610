//! Facility-location objectives: each objective is the worst composed gauge
//! distance from the facility to one cluster of demand points,
//!
//! ```text
//! φ_i(x) = max_j f_j(γ_1(x - d_1), …, γ_p(x - d_p))
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::gauge::GaugeSet;
use crate::error::{Error, Result};
use crate::problem::{ComponentOracle, Point, Problem, ProblemFlags};

/// Nondecreasing maps applied to the vector of gauge distances of a cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Composition {
    /// `f_j(γ) = γ_j`
    Identity,
    /// `f_j(γ) = ⟨w, γ⟩ + offset` with `w ≥ 0`.
    Affine { weights: Vec<f64>, offset: f64 },
    /// `f_j(γ) = γ_j^q` with `q ≥ 1`.
    Power { q: f64 },
}

/// One cluster of demand points with per-point gauge and composition map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub demand_points: Vec<Point>,
    pub gauges: Vec<GaugeSet>,
    pub compositions: Vec<Composition>,
}

impl ClusterSpec {
    /// Euclidean distances with identity compositions.
    pub fn euclidean(points: Vec<Point>) -> Self {
        let p = points.len();
        Self {
            demand_points: points,
            gauges: vec![GaugeSet::unit_ball(); p],
            compositions: vec![Composition::Identity; p],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let p = self.demand_points.len();
        if p == 0 {
            return Err(Error::Construction("empty cluster".into()));
        }
        if self.gauges.len() != p || self.compositions.len() != p {
            return Err(Error::Construction(format!(
                "cluster has {p} demand points but {} gauges and {} compositions",
                self.gauges.len(),
                self.compositions.len()
            )));
        }
        for d in &self.demand_points {
            if d.dim() != n {
                return Err(Error::Construction(format!(
                    "demand point dimension {} differs from {n}",
                    d.dim()
                )));
            }
            crate::problem::check_finite(d)?;
        }
        for g in &self.gauges {
            g.validate(n)?;
        }
        for c in &self.compositions {
            match c {
                Composition::Identity => {}
                Composition::Affine { weights, offset } => {
                    if weights.len() != p {
                        return Err(Error::Construction(format!(
                            "affine composition needs {p} weights"
                        )));
                    }
                    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || !offset.is_finite() {
                        return Err(Error::Construction(
                            "affine composition weights must be nonnegative".into(),
                        ));
                    }
                }
                Composition::Power { q } => {
                    if !(*q >= 1.0 && q.is_finite()) {
                        return Err(Error::Construction(format!(
                            "power composition needs q >= 1, got {q}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

struct ClusterComponent {
    spec: ClusterSpec,
}

impl ClusterComponent {
    fn distances(&self, x: &[f64]) -> Vec<f64> {
        self.spec
            .demand_points
            .iter()
            .zip(&self.spec.gauges)
            .map(|(d, g)| g.value(&crate::linalg::sub(x, d)))
            .collect()
    }

    fn branch(&self, j: usize, gamma: &[f64]) -> f64 {
        match &self.spec.compositions[j] {
            Composition::Identity => gamma[j],
            Composition::Affine { weights, offset } => crate::linalg::dot(weights, gamma) + offset,
            Composition::Power { q } => gamma[j].powf(*q),
        }
    }

    fn gauge_gradient(&self, l: usize, x: &[f64]) -> Vec<f64> {
        let d = &self.spec.demand_points[l];
        self.spec.gauges[l].subgradient(&crate::linalg::sub(x, d))
    }
}

impl ComponentOracle for ClusterComponent {
    fn value(&self, x: &[f64]) -> f64 {
        let gamma = self.distances(x);
        (0..gamma.len())
            .map(|j| self.branch(j, &gamma))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gradient of the first maximizing branch.
    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let gamma = self.distances(x);
        let mut active = 0;
        let mut best = f64::NEG_INFINITY;
        for j in 0..gamma.len() {
            let v = self.branch(j, &gamma);
            if v > best {
                best = v;
                active = j;
            }
        }
        let g = match &self.spec.compositions[active] {
            Composition::Identity => self.gauge_gradient(active, x),
            Composition::Power { q } => {
                let s = q * gamma[active].powf(q - 1.0);
                crate::linalg::scale(&self.gauge_gradient(active, x), s)
            }
            Composition::Affine { weights, .. } => {
                let grads: Vec<Vec<f64>> = (0..gamma.len()).map(|l| self.gauge_gradient(l, x)).collect();
                crate::linalg::combine(weights, &grads, x.len())
            }
        };
        Some(g)
    }
}

/// One objective per cluster, aggregated by max over the cluster's branches.
pub fn make_location(clusters: &[ClusterSpec]) -> Result<Problem> {
    let first = clusters
        .first()
        .ok_or_else(|| Error::Construction("at least one cluster is required".into()))?;
    let n = first
        .demand_points
        .first()
        .ok_or_else(|| Error::Construction("empty cluster".into()))?
        .dim();
    if n < 2 {
        return Err(Error::Construction(format!(
            "location problems need dimension n >= 2, got {n}"
        )));
    }
    for c in clusters {
        c.validate(n)?;
    }
    let components = clusters
        .iter()
        .map(|spec| Arc::new(ClusterComponent { spec: spec.clone() }) as Arc<dyn ComponentOracle>)
        .collect();
    Problem::new(
        format!("location[{}]", clusters.len()),
        n,
        components,
        ProblemFlags {
            smooth: false,
            claimed_quasiconvex: true,
            claimed_convex: true,
            positive: false,
        },
    )
}
