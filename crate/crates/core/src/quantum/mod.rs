//! Grid-based reference dynamics and wave-packet assembly: split-step
//! propagation on a rectangular grid, observables, L2 error notions,
//! approximant construction in Cartesian and tubular coordinates, and
//! residual/convergence diagnostics.

pub mod assemble;
pub mod convergence;
pub mod grid;
pub mod observables;
pub mod residual;
pub mod splitstep;

pub use assemble::{
    assemble_curve, assemble_flat, Assembled, CutSpec, HarmonicGroundCorrection, HarmonicProfile,
    TransverseProfile,
};
pub use convergence::{HbarRun, StudyResult};
pub use grid::{Grid2D, GridState};
pub use observables::{l2_error, marginal_x, observables, transverse_spread, L2Error, Observables};
pub use residual::{apply_h_bo, residual_norm, TubGrid};
pub use splitstep::{split_step_propagate, Propagator, BOUNDARY_GUARD};
