//! Numerical laboratory for quantum dynamics confined to a curve by a steep
//! transverse potential: geometry of tubular neighborhoods, transverse
//! spectra, squeezed wave packets, classical flows with dispersion matrices,
//! split-step propagation, and the comparison pipelines tying them together.

// `!(x > 0.0)` is the NaN-rejecting form of the positivity guards; keep it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// closure-boxed scenario wiring trades type brevity for owned captures
#![allow(clippy::type_complexity)]

pub mod classical;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod packets;
pub mod quantum;
pub mod scenarios;
pub mod transverse;

pub use error::{Error, Result};
