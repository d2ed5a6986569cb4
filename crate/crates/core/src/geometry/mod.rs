//! Constraint-manifold geometry: plane curves in arc length, tubular
//! coordinates around them, general embedding quantities, and validators
//! for confining potentials.

mod constraint;
mod curve;
mod embedding;
mod tubular;

pub use constraint::{validate_constraint, ConstraintReport, ConstraintSample};
pub use curve::PlaneCurve;
pub use embedding::{embedding_quantities, EmbeddingQuantities, EmbeddingSpec};
pub use tubular::TubularChart;
