//! Classical and quantum Sanov-type hypothesis testing, computed exactly at
//! desk scale.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`, which is what the experiments use.

// `!(x > 0)` is deliberate throughout: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blocks;
pub mod classical;
pub mod counterexamples;
pub mod error;
pub mod quantum;
pub mod scalar;
pub mod separation;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Distribution = classical::Distribution<f64>;
pub type Distribution32 = classical::Distribution<f32>;
pub type RatePoint = classical::RatePoint<f64>;
pub type TypicalSetSpec = classical::TypicalSetSpec<f64>;
pub type EpsSchedule = classical::EpsSchedule<f64>;
pub type DensityOperator = quantum::DensityOperator<f64>;
pub type Projection = quantum::Projection<f64>;
pub type SpectralDecomposition = quantum::SpectralDecomposition<f64>;
pub type SpectralBlockStructure = blocks::SpectralBlockStructure<f64>;
pub type AbelianAlgebra = blocks::AbelianAlgebra<f64>;
pub type Classicalization = separation::Classicalization<f64>;
pub type JoinedProjection = separation::JoinedProjection<f64>;
pub type NPBracket = separation::NPBracket<f64>;
pub type Theorem2Report = separation::Theorem2Report<f64>;
