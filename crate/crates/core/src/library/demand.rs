//! Demand-theory objectives: negated Cobb-Douglas and CES utilities.
//!
//! Utilities live on the nonnegative orthant of `R^2`. To keep the problem
//! unconstrained, each component is evaluated at `x⁺ = max(x, 0)` and the
//! penalty `‖min(x, 0)‖²` is added. Where a utility is not differentiable
//! (some `x_i ≤ 0`) its gradient contribution is taken to be zero.
//!
//! An optional [`Budget`] bounds the problem: the component becomes
//! `max(base(x), slope · (⟨p, x⟩ - income))`, a max of two quasiconvex
//! functions and hence quasiconvex.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{ComponentOracle, Problem, ProblemFlags};

/// `μ(x₁, x₂) = k · x₁^α · x₂^β`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CobbDouglas {
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl CobbDouglas {
    pub fn new(k: f64, alpha: f64, beta: f64) -> Self {
        Self { k, alpha, beta }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("k", self.k), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Construction(format!(
                    "Cobb-Douglas {name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// `μ(x₁, x₂) = (λ₁ x₁^ρ + λ₂ x₂^ρ)^(1/ρ)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ces {
    pub lambda1: f64,
    pub lambda2: f64,
    pub rho: f64,
}

impl Ces {
    pub fn new(lambda1: f64, lambda2: f64, rho: f64) -> Self {
        Self {
            lambda1,
            lambda2,
            rho,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lambda1 >= 0.0 && self.lambda2 >= 0.0) {
            return Err(Error::Construction("CES weights must be nonnegative".into()));
        }
        if (self.lambda1 + self.lambda2 - 1.0).abs() > 1e-12 {
            return Err(Error::Construction(format!(
                "CES weights must sum to 1, got {}",
                self.lambda1 + self.lambda2
            )));
        }
        if self.rho == 0.0 || !self.rho.is_finite() {
            return Err(Error::Construction("CES exponent rho must be finite and nonzero".into()));
        }
        Ok(())
    }
}

/// Linear budget `slope · (⟨prices, x⟩ - income)` joined to each component by a max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub prices: [f64; 2],
    pub income: f64,
    pub slope: f64,
}

impl Budget {
    fn validate(&self) -> Result<()> {
        if self.prices.iter().any(|p| !(*p > 0.0)) || !(self.income > 0.0) || !(self.slope > 0.0) {
            return Err(Error::Construction(
                "budget prices, income and slope must be positive".into(),
            ));
        }
        Ok(())
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.slope * (self.prices[0] * x[0] + self.prices[1] * x[1] - self.income)
    }
}

trait Utility: Send + Sync {
    /// Utility at a point of the closed orthant.
    fn utility(&self, x: [f64; 2]) -> f64;
    /// Gradient where it exists; zero elsewhere.
    fn utility_gradient(&self, x: [f64; 2]) -> [f64; 2];
}

impl Utility for CobbDouglas {
    fn utility(&self, x: [f64; 2]) -> f64 {
        self.k * x[0].powf(self.alpha) * x[1].powf(self.beta)
    }

    fn utility_gradient(&self, x: [f64; 2]) -> [f64; 2] {
        if x[0] <= 0.0 || x[1] <= 0.0 {
            return [0.0, 0.0];
        }
        let u = self.utility(x);
        [self.alpha * u / x[0], self.beta * u / x[1]]
    }
}

impl Utility for Ces {
    fn utility(&self, x: [f64; 2]) -> f64 {
        let r = self.rho;
        if r < 0.0 && ((self.lambda1 > 0.0 && x[0] <= 0.0) || (self.lambda2 > 0.0 && x[1] <= 0.0)) {
            return 0.0;
        }
        let s = term(self.lambda1, x[0], r) + term(self.lambda2, x[1], r);
        if s <= 0.0 {
            0.0
        } else {
            s.powf(1.0 / r)
        }
    }

    fn utility_gradient(&self, x: [f64; 2]) -> [f64; 2] {
        if x[0] <= 0.0 || x[1] <= 0.0 {
            return [0.0, 0.0];
        }
        let r = self.rho;
        let s = self.lambda1 * x[0].powf(r) + self.lambda2 * x[1].powf(r);
        let outer = s.powf(1.0 / r - 1.0);
        [
            outer * self.lambda1 * x[0].powf(r - 1.0),
            outer * self.lambda2 * x[1].powf(r - 1.0),
        ]
    }
}

fn term(lambda: f64, v: f64, r: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        lambda * v.powf(r)
    }
}

struct NegatedUtility<U> {
    utility: U,
    budget: Option<Budget>,
}

impl<U: Utility> NegatedUtility<U> {
    fn base(&self, x: &[f64]) -> f64 {
        let pos = [x[0].max(0.0), x[1].max(0.0)];
        let pen: f64 = x.iter().map(|v| v.min(0.0).powi(2)).sum();
        -self.utility.utility(pos) + pen
    }

    fn base_gradient(&self, x: &[f64]) -> Vec<f64> {
        let pos = [x[0].max(0.0), x[1].max(0.0)];
        let du = self.utility.utility_gradient(pos);
        (0..2).map(|i| -du[i] + 2.0 * x[i].min(0.0)).collect()
    }
}

impl<U: Utility> ComponentOracle for NegatedUtility<U> {
    fn value(&self, x: &[f64]) -> f64 {
        let base = self.base(x);
        match &self.budget {
            Some(b) => base.max(b.value(x)),
            None => base,
        }
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        match &self.budget {
            Some(b) if b.value(x) > self.base(x) => {
                Some(b.prices.iter().map(|p| b.slope * p).collect())
            }
            _ => Some(self.base_gradient(x)),
        }
    }
}

fn build<U: Utility + 'static>(
    name: String,
    utilities: Vec<U>,
    budget: Option<Budget>,
    quasiconvex: bool,
) -> Result<Problem> {
    if utilities.is_empty() {
        return Err(Error::Construction("at least one utility is required".into()));
    }
    if let Some(b) = &budget {
        b.validate()?;
    }
    let components = utilities
        .into_iter()
        .map(|utility| Arc::new(NegatedUtility { utility, budget }) as Arc<dyn ComponentOracle>)
        .collect();
    Problem::new(
        name,
        2,
        components,
        ProblemFlags {
            smooth: false,
            claimed_quasiconvex: quasiconvex,
            claimed_convex: false,
            positive: false,
        },
    )
}

/// Negated Cobb-Douglas utilities on `R^2`, one objective per spec.
pub fn make_cobb_douglas(specs: &[CobbDouglas]) -> Result<Problem> {
    make_cobb_douglas_with_budget(specs, None)
}

pub fn make_cobb_douglas_with_budget(specs: &[CobbDouglas], budget: Option<Budget>) -> Result<Problem> {
    for s in specs {
        s.validate()?;
    }
    build(format!("cobb-douglas[{}]", specs.len()), specs.to_vec(), budget, true)
}

/// Negated CES utilities on `R^2`.
///
/// The extended components are quasiconvex only for `ρ < 0`. For `ρ > 1` the
/// utility itself is not quasiconcave. For `0 < ρ ≤ 1` the indifference curves
/// meet the axes with a vertical tangent, so no sublevel set of the extension
/// past the orthant stays convex. Such problems are flagged accordingly.
pub fn make_ces(specs: &[Ces]) -> Result<Problem> {
    make_ces_with_budget(specs, None)
}

pub fn make_ces_with_budget(specs: &[Ces], budget: Option<Budget>) -> Result<Problem> {
    for s in specs {
        s.validate()?;
    }
    let quasiconvex = specs.iter().all(|s| s.rho < 0.0);
    build(format!("ces[{}]", specs.len()), specs.to_vec(), budget, quasiconvex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cobb_douglas_values() {
        let p = make_cobb_douglas(&[CobbDouglas::new(1.0, 0.5, 0.5)]).unwrap();
        assert_relative_eq!(p.evaluate(&[1.0, 1.0]).unwrap()[0], -1.0);
        assert_relative_eq!(p.evaluate(&[4.0, 1.0]).unwrap()[0], -2.0);
        // extension below the orthant: utility vanishes, penalty applies
        assert_relative_eq!(p.evaluate(&[-1.0, 3.0]).unwrap()[0], 1.0);
        assert_relative_eq!(p.evaluate(&[-1.0, -2.0]).unwrap()[0], 5.0);
        assert!(p.flags().claimed_quasiconvex);
    }

    #[test]
    fn ces_values() {
        let lin = make_ces(&[Ces::new(0.5, 0.5, 1.0)]).unwrap();
        assert_relative_eq!(lin.evaluate(&[2.0, 2.0]).unwrap()[0], -2.0);
        assert_relative_eq!(lin.evaluate(&[0.0, 4.0]).unwrap()[0], -2.0);
        let sq = make_ces(&[Ces::new(0.3, 0.7, 2.0)]).unwrap();
        assert_relative_eq!(sq.evaluate(&[1.0, 1.0]).unwrap()[0], -1.0, epsilon = 1e-15);
        assert!(!sq.flags().claimed_quasiconvex);
        let neg = make_ces(&[Ces::new(0.5, 0.5, -1.0)]).unwrap();
        assert_relative_eq!(neg.evaluate(&[0.0, 4.0]).unwrap()[0], 0.0);
        assert_relative_eq!(neg.evaluate(&[1.0, 1.0]).unwrap()[0], -1.0);
    }

    #[test]
    fn construction_errors() {
        assert!(make_cobb_douglas(&[CobbDouglas::new(0.0, 0.5, 0.5)]).is_err());
        assert!(make_cobb_douglas(&[CobbDouglas::new(1.0, -0.5, 0.5)]).is_err());
        assert!(make_cobb_douglas(&[]).is_err());
        assert!(make_ces(&[Ces::new(0.5, 0.6, 1.0)]).is_err());
        assert!(make_ces(&[Ces::new(0.5, 0.5, 0.0)]).is_err());
        let bad = Budget { prices: [1.0, 0.0], income: 1.0, slope: 1.0 };
        assert!(make_cobb_douglas_with_budget(&[CobbDouglas::new(1.0, 0.5, 0.5)], Some(bad)).is_err());
    }

    #[test]
    fn gradients_match_finite_differences_inside_orthant() {
        let p = make_cobb_douglas(&[CobbDouglas::new(2.0, 0.3, 0.6)]).unwrap();
        let q = make_ces(&[Ces::new(0.4, 0.6, 0.5)]).unwrap();
        let x = [1.3, 0.7];
        for prob in [&p, &q] {
            let g = prob.subgradient(0, &x).unwrap();
            for k in 0..2 {
                let mut e = [0.0; 2];
                e[k] = 1.0;
                let fd = crate::problem::central_difference(prob, 0, &x, &e, 1e-5).unwrap();
                assert!((fd - g[k]).abs() < 1e-8, "{fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn budget_branch_selection() {
        let b = Budget { prices: [1.0, 2.0], income: 2.0, slope: 3.0 };
        let p = make_cobb_douglas_with_budget(&[CobbDouglas::new(1.0, 0.5, 0.5)], Some(b)).unwrap();
        // far outside the budget the linear branch is active
        assert_relative_eq!(p.evaluate(&[10.0, 10.0]).unwrap()[0], 3.0 * 28.0);
        assert_eq!(p.subgradient(0, &[10.0, 10.0]).unwrap(), vec![3.0, 6.0]);
        // deep inside the budget the utility branch is active
        assert_relative_eq!(p.evaluate(&[1.0, 0.25]).unwrap()[0], -0.5);
    }
}
