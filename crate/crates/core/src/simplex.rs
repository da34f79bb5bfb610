//! Minimum-norm element of the convex hull of a few vectors,
//! `min_{λ ∈ Δ} ‖Σ λ_i v_i‖`.
//!
//! Up to two vectors are handled in closed form. Larger sets use projected
//! gradient on the simplex with a fixed step `1/L`, where `L` bounds the top
//! eigenvalue of the Gram matrix from above.

use crate::linalg::{combine, dot, norm};

/// Result of [`min_norm_combination`].
#[derive(Debug, Clone, PartialEq)]
pub struct MinNorm {
    pub weights: Vec<f64>,
    pub point: Vec<f64>,
    pub norm: f64,
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn gram(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|a| vectors.iter().map(|b| dot(a, b)).collect())
        .collect()
}

fn mat_vec(g: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    g.iter().map(|row| dot(row, x)).collect()
}

/// Upper bound on the top eigenvalue of a Gram matrix: the smaller of its
/// trace and Frobenius norm.
fn top_eigenvalue_bound(g: &[Vec<f64>]) -> f64 {
    let trace: f64 = (0..g.len()).map(|i| g[i][i]).sum();
    let frobenius = g.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    trace.min(frobenius).max(f64::MIN_POSITIVE)
}

/// Minimum-norm convex combination of `vectors` (all of one dimension).
///
/// `iters` bounds the projected-gradient loop used for three or more vectors.
pub fn min_norm_combination(vectors: &[Vec<f64>], iters: usize) -> MinNorm {
    assert!(!vectors.is_empty(), "need at least one vector");
    let n = vectors[0].len();
    let weights = match vectors.len() {
        1 => vec![1.0],
        2 => {
            let (a, b) = (&vectors[0], &vectors[1]);
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let dd = dot(&diff, &diff);
            // minimize ‖b + λ(a - b)‖ over λ ∈ [0, 1]
            let lambda = if dd == 0.0 {
                1.0
            } else {
                (-dot(b, &diff) / dd).clamp(0.0, 1.0)
            };
            vec![lambda, 1.0 - lambda]
        }
        m => {
            let g = gram(vectors);
            let step = 1.0 / top_eigenvalue_bound(&g);
            let mut lambda = vec![1.0 / m as f64; m];
            for _ in 0..iters {
                let grad = mat_vec(&g, &lambda);
                let trial: Vec<f64> = lambda.iter().zip(&grad).map(|(l, gr)| l - step * gr).collect();
                lambda = project_simplex(&trial);
            }
            // the simplex vertices can beat a slowly converging iterate
            let current = dot(&lambda, &mat_vec(&g, &lambda));
            if let Some(best) = (0..m).min_by(|&i, &j| g[i][i].total_cmp(&g[j][j])) {
                if g[best][best] < current {
                    lambda = vec![0.0; m];
                    lambda[best] = 1.0;
                }
            }
            lambda
        }
    };
    let point = combine(&weights, vectors, n);
    let nrm = norm(&point);
    MinNorm {
        weights,
        point,
        norm: nrm,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn closed_form_examples() {
        let r = min_norm_combination(&[vec![1.0], vec![-1.0]], 0);
        assert_eq!(r.weights, vec![0.5, 0.5]);
        assert_eq!(r.norm, 0.0);

        let r = min_norm_combination(&[vec![4.0], vec![2.0]], 0);
        assert_eq!(r.weights, vec![0.0, 1.0]);
        assert_eq!(r.norm, 2.0);

        let r = min_norm_combination(&[vec![0.0, 0.0]], 0);
        assert_eq!(r.norm, 0.0);
    }

    #[test]
    fn origin_inside_triangle() {
        let v = vec![vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]];
        let r = min_norm_combination(&v, 200);
        assert!(r.norm < 1e-8, "{r:?}");
    }

    #[test]
    fn top_eigenvector_orthogonal_to_ones() {
        // Gram eigenvector (0, 1, -1) carries the top eigenvalue 16
        let v = vec![vec![1.0, 1.0], vec![-3.0, 1.0], vec![1.0, -3.0]];
        let r = min_norm_combination(&v, 200);
        assert!(r.norm < 1e-12, "{r:?}");
        for (w, expected) in r.weights.iter().zip([0.5, 0.25, 0.25]) {
            assert!((w - expected).abs() < 1e-12);
        }
    }

    fn brute_force(vectors: &[Vec<f64>], steps: usize) -> f64 {
        let mut best = f64::INFINITY;
        for a in 0..=steps {
            for b in 0..=(steps - a) {
                let l = [a as f64 / steps as f64, b as f64 / steps as f64];
                let w = [l[0], l[1], 1.0 - l[0] - l[1]];
                best = best.min(norm(&combine(&w, vectors, vectors[0].len())));
            }
        }
        best
    }

    #[test]
    fn matches_grid_oracle_for_three_vectors() {
        let cases = [
            vec![vec![3.0, 1.0], vec![2.0, 2.0], vec![4.0, -1.0]],
            vec![vec![1.0, 2.0, 0.5], vec![-0.5, 1.0, 1.0], vec![0.3, 0.2, 2.0]],
            vec![vec![5.0, 0.0], vec![5.0, 1.0], vec![6.0, -1.0]],
        ];
        for v in &cases {
            let r = min_norm_combination(v, 2000);
            let oracle = brute_force(v, 600);
            assert!(r.norm <= oracle + 1e-9, "{} vs {oracle}", r.norm);
            assert!(r.norm >= oracle - 5e-3, "{} vs {oracle}", r.norm);
        }
    }

    proptest! {
        #[test]
        fn projection_lands_on_simplex(v in prop::collection::vec(-10.0f64..10.0, 1..8)) {
            let p = project_simplex(&v);
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn projection_is_idempotent(v in prop::collection::vec(-10.0f64..10.0, 1..8)) {
            let p = project_simplex(&v);
            let q = project_simplex(&p);
            for (a, b) in p.iter().zip(&q) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn never_worse_than_any_vertex(
            v in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..6)
        ) {
            let r = min_norm_combination(&v, 500);
            let best_vertex = v.iter().map(|x| norm(x)).fold(f64::INFINITY, f64::min);
            prop_assert!(r.norm <= best_vertex + 1e-12);
            prop_assert!((r.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
