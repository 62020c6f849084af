//! Numerical toolkit for alpha-Riesz capacities of convex bodies:
//! equilibrium measures, fractional normal derivatives, shape-derivative
//! verification, constrained shape flows, and Brunn-Minkowski checks.
//!
//! Everything numeric is generic over the scalar type through
//! [`scalar::Real`]; the aliases below pin the `f64` instantiations used by
//! the command-line driver.

pub mod cache;
pub mod equilibrium;
pub mod error;
pub mod fractional;
pub mod geom;
pub mod hadamard;
pub mod quad;
pub mod scalar;
pub mod shapeopt;
pub mod sphere_geom;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` instantiations of the core types.
pub type DirectionGrid = sphere_geom::DirectionGrid<f64>;
pub type SupportVector = sphere_geom::SupportVector<f64>;
pub type Body = sphere_geom::Body<f64>;
pub type NodeSet = equilibrium::NodeSet<f64>;
pub type EquilibriumSolution = equilibrium::EquilibriumSolution<f64>;
pub type FracConstants = fractional::FracConstants<f64>;
pub type NormalDerivativeTrace = fractional::NormalDerivativeTrace<f64>;
pub type FlowState = shapeopt::FlowState<f64>;
pub type FlowTrace = shapeopt::FlowTrace<f64>;
pub type PerturbationPair = hadamard::PerturbationPair<f64>;
