//! Classification, algorithm synthesis and LOCAL-model simulation for
//! locally checkable optimization problems on directed cycles.

pub mod catalog;
pub mod classify;
pub mod debruijn;
pub mod params;
pub mod pipeline;
pub mod problem;
pub mod scalar;
pub mod sim;
pub mod synthesis;
pub mod tables;
pub mod verify;

pub use num_rational::{BigRational, Ratio};

/// Default exact scalar: a 64-bit rational.
pub type Rational = Ratio<i64>;

pub type Problem = problem::OptLcl<Rational>;
pub type Graph = debruijn::DeBruijnGraph<Rational>;
pub type Cost = problem::CostValue<Rational>;
