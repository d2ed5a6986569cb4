//! Transverse (normal-direction) Hamiltonians at a fixed base point:
//! harmonic spectra and effective potentials, finite-difference eigensolvers
//! in 1D and 2D, the quasi-exactly-solvable sextic check, closed forms for
//! the 2x2 eigenvalue-crossing family, and the reduced resolvent.

mod fd1d;
mod fd2d;
mod harmonic;
mod rellich;
mod resolvent;
mod sextic;

pub use fd1d::{fd_eigensolve_1d, fd_eigensolve_1d_auto, Eigenpair1D, Grid1D};
pub use fd2d::{fd_eigensolve_2d, Eigenpair2D};
pub use harmonic::harmonic_effective_potential;
pub use rellich::{branch_angle, cut_function, RellichModel};
pub use resolvent::{reduced_resolvent_apply, reduced_resolvent_apply_harmonic};
pub use sextic::{sextic_qes_check, KineticConvention, SexticCheck};
