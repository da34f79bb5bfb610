//! Scalarization proximal point method (SPPM) for multiobjective problems
//! whose components are quasiconvex and possibly nonsmooth.
//!
//! Each outer step minimizes a regularized weighted sum
//! `⟨F(x), z⟩ + (β/2)‖x − x^k‖²` over the level set `{x : F(x) ⪯ F(x^k)}`, so
//! the iterates descend in every objective at once. The crate also ships a
//! catalog of test problems, Pareto-Clarke criticality tests, run diagnostics
//! and a command-line front end.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod clarke;
pub mod cli;
pub mod criticality;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod inner;
pub mod library;
mod linalg;
pub mod order;
pub mod problem;
pub mod rng;
pub mod scalarize;
pub mod simplex;
pub mod sweep;

pub use error::{Error, Result};
pub use order::ObjectiveVector;
pub use problem::{Point, Problem, ProblemFlags};
