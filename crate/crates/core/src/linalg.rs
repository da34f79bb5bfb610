//! Small dense vector helpers. Dimensions here are tiny, so plain slices do.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `x + t * d`
pub(crate) fn axpy(x: &[f64], t: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(a, b)| a + t * b).collect()
}

pub(crate) fn scale(a: &[f64], t: f64) -> Vec<f64> {
    a.iter().map(|v| v * t).collect()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `Σ_i w_i v_i`
pub(crate) fn combine(weights: &[f64], vectors: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (w, v) in weights.iter().zip(vectors) {
        for (o, vi) in out.iter_mut().zip(v) {
            *o += w * vi;
        }
    }
    out
}
