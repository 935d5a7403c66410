//! Spectral Galerkin oracle: sine-series Newton for the reduced profile
//! equations, exact `□⁻¹` pairings for the nonlocal functionals, the
//! large-`n` development, the bifurcation equation on `V_n` and the range
//! equation on W.

mod bif;
mod box_op;
mod development;
mod ode;
mod range;
mod series;

pub use bif::*;
pub use box_op::*;
pub use development::*;
pub use ode::*;
pub use range::*;
pub use series::*;
