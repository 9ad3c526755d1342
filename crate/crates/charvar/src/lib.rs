//! Coordinates, trace formulas, triangle switches, trace-reduction
//! algorithms and mapping-class dynamics for type-preserving
//! representations of the thrice-punctured projective plane N₁,₃.
//!
//! The algebra is generic over [`Scalar`]; use [`Exact`] (big rationals)
//! for every predicate that is rational in the coordinates and `f64` where
//! square roots or long orbits are involved.

pub mod algorithms;
pub mod cli;
pub mod coords;
pub mod dynamics;
pub mod error;
pub mod scalar;
pub mod surface;
pub mod switches;
pub mod traces;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Exact rational backend.
pub type Exact = num_rational::BigRational;

pub type ExactCoords = coords::TriangleCoords<Exact>;
pub type FloatCoords = coords::TriangleCoords<f64>;
pub type ExactLambda = coords::LambdaLengths<Exact>;
pub type FloatLambda = coords::LambdaLengths<f64>;

/// Version of the JSON/CSV output schema.
pub const SCHEMA_VERSION: &str = "1.0";
