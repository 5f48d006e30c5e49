//! Numerical laboratory for Fejér-monotone sequences and iterates of
//! nonexpansive maps on ℝᵈ.
//!
//! * [`geometry`]: convex sets with exact projectors, dual cones, codimension.
//! * [`operators`]: expression trees of nonexpansive maps with averagedness
//!   certificates.
//! * [`dynamics`]: orbits, normalized and difference orbits, shadows, limit
//!   detection and the displacement vector.
//! * [`analysis`]: checkers for sequence properties.
//! * [`scenarios`]: built-in and config-driven runs with CSV/JSON export.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod operators;
pub mod random;
pub mod scenarios;
pub mod vector;

pub use error::{Error, Result};
pub use geometry::ConvexSet;
pub use operators::OperatorExpr;
pub use vector::Vector;
