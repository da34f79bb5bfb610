//! Vector objectives `F = (F_1, …, F_m): R^n → R^m` with per-component value
//! and Clarke-subgradient oracles.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::ObjectiveVector;

/// A point of decision space `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    /// Builds a point, rejecting empty or non-finite coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        check_finite(&coords)?;
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Self(v.to_vec())
    }
}

pub(crate) fn check_finite(v: &[f64]) -> Result<()> {
    match v.iter().enumerate().find(|(_, x)| !x.is_finite()) {
        Some((index, &value)) => Err(Error::NonFinite { index, value }),
        None => Ok(()),
    }
}

/// One scalar component `F_i` of a vector objective.
///
/// `subgradient` returns a single element of the Clarke subdifferential at
/// `x`, or `None` when the oracle has no selection rule there.
pub trait ComponentOracle: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>>;
}

/// A component built from a pair of closures.
pub struct FnComponent<V, G> {
    value: V,
    subgradient: G,
}

impl<V, G> FnComponent<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync,
{
    pub fn new(value: V, subgradient: G) -> Self {
        Self { value, subgradient }
    }
}

impl<V, G> ComponentOracle for FnComponent<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64]) -> Option<Vec<f64>> + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        (self.subgradient)(x)
    }
}

/// Structural claims about a problem. Only `smooth` changes solver behaviour
/// directly; the others select defaults and gate test expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProblemFlags {
    /// Every subgradient oracle returns the exact gradient.
    pub smooth: bool,
    /// Each component is quasiconvex.
    pub claimed_quasiconvex: bool,
    /// Each component is convex.
    pub claimed_convex: bool,
    /// `0 ≺ F(x)` everywhere.
    pub positive: bool,
}

/// A vector objective over `R^n`. Cloning shares the oracles.
#[derive(Clone)]
pub struct Problem {
    name: String,
    n: usize,
    components: Vec<Arc<dyn ComponentOracle>>,
    flags: ProblemFlags,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("m", &self.m())
            .field("flags", &self.flags)
            .finish()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        components: Vec<Arc<dyn ComponentOracle>>,
        flags: ProblemFlags,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Construction("dimension n must be at least 1".into()));
        }
        if components.is_empty() {
            return Err(Error::Construction("at least one objective is required".into()));
        }
        Ok(Self {
            name: name.into(),
            n,
            components,
            flags,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.components.len()
    }

    pub fn flags(&self) -> ProblemFlags {
        self.flags
    }

    pub fn is_smooth(&self) -> bool {
        self.flags.smooth
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: x.len(),
            });
        }
        check_finite(x)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.m() {
            return Err(Error::ComponentIndex {
                index: i,
                m: self.m(),
            });
        }
        Ok(())
    }

    /// `F_i(x)`, zero-based `i`.
    pub fn component_value(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_index(i)?;
        self.check_point(x)?;
        let value = self.components[i].value(x);
        if !value.is_finite() {
            return Err(Error::Evaluation {
                component: i,
                value,
            });
        }
        Ok(value)
    }

    /// `F(x) = (F_1(x), …, F_m(x))`.
    pub fn evaluate(&self, x: &[f64]) -> Result<ObjectiveVector> {
        self.check_point(x)?;
        let values = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let value = c.value(x);
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::Evaluation {
                        component: i,
                        value,
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        ObjectiveVector::new(values)
    }

    /// One element of the Clarke subdifferential of `F_i` at `x`.
    pub fn subgradient(&self, i: usize, x: &[f64]) -> Result<Vec<f64>> {
        self.check_index(i)?;
        self.check_point(x)?;
        let g = self.components[i]
            .subgradient(x)
            .ok_or(Error::Selection { component: i })?;
        if g.len() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: g.len(),
            });
        }
        if let Some(&value) = g.iter().find(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                component: i,
                value,
            });
        }
        Ok(g)
    }

    /// All component subgradients at `x`, in component order.
    pub fn subgradients(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        (0..self.m()).map(|i| self.subgradient(i, x)).collect()
    }

    /// The problem `x ↦ (exp F_1(x), …, exp F_m(x))`.
    ///
    /// Same Pareto and weak-Pareto sets, strictly positive values, and the
    /// subgradient selections follow the chain rule `exp(F_i(x)) g_i`.
    /// Very large component values overflow to an evaluation error; rescale
    /// the problem first if that happens.
    pub fn exp_transform(&self) -> Problem {
        let components = self
            .components
            .iter()
            .map(|c| Arc::new(ExpComponent(Arc::clone(c))) as Arc<dyn ComponentOracle>)
            .collect();
        Problem {
            name: format!("exp({})", self.name),
            n: self.n,
            components,
            flags: ProblemFlags {
                positive: true,
                ..self.flags
            },
        }
    }
}

struct ExpComponent(Arc<dyn ComponentOracle>);

impl ComponentOracle for ExpComponent {
    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x).exp()
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let scale = self.0.value(x).exp();
        self.0
            .subgradient(x)
            .map(|g| g.into_iter().map(|v| v * scale).collect())
    }
}

/// Central difference `(f(x + h d) - f(x - h d)) / 2h` of component `i`.
pub fn central_difference(problem: &Problem, i: usize, x: &[f64], d: &[f64], h: f64) -> Result<f64> {
    let plus = crate::linalg::axpy(x, h, d);
    let minus = crate::linalg::axpy(x, -h, d);
    Ok((problem.component_value(i, &plus)? - problem.component_value(i, &minus)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;
    use approx::assert_relative_eq;

    fn abs_problem() -> Problem {
        let c = FnComponent::new(
            |x: &[f64]| x[0].abs(),
            |x: &[f64]| Some(vec![if x[0] > 0.0 { 1.0 } else if x[0] < 0.0 { -1.0 } else { 0.0 }]),
        );
        Problem::new("abs", 1, vec![Arc::new(c)], ProblemFlags::default()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let quad = library::make_convex_quadratic(&[vec![0.0].into(), vec![1.0].into()]).unwrap();
        assert_eq!(quad.evaluate(&[0.0]).unwrap().values(), &[0.0, 1.0]);

        let cd = library::make_cobb_douglas(&[library::CobbDouglas::new(1.0, 0.5, 0.5)]).unwrap();
        assert_relative_eq!(cd.evaluate(&[1.0, 1.0]).unwrap()[0], -1.0);

        let ces = library::make_ces(&[library::Ces::new(0.5, 0.5, 1.0)]).unwrap();
        assert_relative_eq!(ces.evaluate(&[2.0, 2.0]).unwrap()[0], -2.0);
    }

    #[test]
    fn evaluate_rejects_bad_input() {
        let quad = library::make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        assert!(matches!(
            quad.evaluate(&[0.0, 1.0]),
            Err(Error::Dimension { expected: 1, found: 2 })
        ));
        assert!(quad.evaluate(&[f64::NAN]).is_err());

        let blowup = FnComponent::new(|_: &[f64]| f64::INFINITY, |_: &[f64]| Some(vec![0.0]));
        let fine = FnComponent::new(|_: &[f64]| 0.0, |_: &[f64]| Some(vec![0.0]));
        let p = Problem::new(
            "blowup",
            1,
            vec![Arc::new(fine), Arc::new(blowup)],
            ProblemFlags::default(),
        )
        .unwrap();
        assert!(matches!(
            p.evaluate(&[0.0]),
            Err(Error::Evaluation { component: 1, .. })
        ));
    }

    #[test]
    fn subgradient_examples() {
        let quad = library::make_convex_quadratic(&[vec![0.0].into()]).unwrap();
        assert_eq!(quad.subgradient(0, &[3.0]).unwrap(), vec![6.0]);
        assert_eq!(abs_problem().subgradient(0, &[0.0]).unwrap(), vec![0.0]);
        assert!(matches!(
            quad.subgradient(1, &[0.0]),
            Err(Error::ComponentIndex { index: 1, m: 1 })
        ));
    }

    #[test]
    fn missing_selection_is_reported() {
        let c = FnComponent::new(|x: &[f64]| x[0].abs(), |x: &[f64]| {
            (x[0] != 0.0).then(|| vec![x[0].signum()])
        });
        let p = Problem::new("abs-nosel", 1, vec![Arc::new(c)], ProblemFlags::default()).unwrap();
        assert!(p.subgradient(0, &[1.0]).is_ok());
        assert!(matches!(
            p.subgradient(0, &[0.0]),
            Err(Error::Selection { component: 0 })
        ));
    }

    #[test]
    fn exp_transform_examples() {
        let lin = FnComponent::new(|x: &[f64]| x[0], |_: &[f64]| Some(vec![1.0]));
        let p = Problem::new("lin", 1, vec![Arc::new(lin)], ProblemFlags::default()).unwrap();
        let e = p.exp_transform();
        assert!(e.flags().positive);
        assert_relative_eq!(e.evaluate(&[-1.0]).unwrap()[0], 0.367_879_441_171_442_3, epsilon = 1e-15);
        assert_relative_eq!(e.evaluate(&[0.0]).unwrap()[0], 1.0);
        assert_relative_eq!(e.subgradient(0, &[2.0]).unwrap()[0], 7.389_056_098_930_65, epsilon = 1e-12);
        // the source problem is untouched
        assert!(!p.flags().positive);
        assert_eq!(p.evaluate(&[2.0]).unwrap()[0], 2.0);
    }

    #[test]
    fn exp_transform_overflow_is_an_error() {
        let lin = FnComponent::new(|x: &[f64]| x[0], |_: &[f64]| Some(vec![1.0]));
        let p = Problem::new("lin", 1, vec![Arc::new(lin)], ProblemFlags::default())
            .unwrap()
            .exp_transform();
        assert!(matches!(
            p.evaluate(&[1000.0]),
            Err(Error::Evaluation { component: 0, .. })
        ));
    }

    #[test]
    fn construction_guards() {
        assert!(Problem::new("empty", 1, vec![], ProblemFlags::default()).is_err());
        let c = FnComponent::new(|_: &[f64]| 0.0, |_: &[f64]| Some(vec![]));
        assert!(Problem::new("n0", 0, vec![Arc::new(c)], ProblemFlags::default()).is_err());
        assert!(Point::new(vec![]).is_err());
        assert!(Point::new(vec![1.0, f64::NEG_INFINITY]).is_err());
    }
}
