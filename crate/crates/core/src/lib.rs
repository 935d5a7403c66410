//! Numerical construction and certification of bifurcating periodic
//! solutions of the nonlinear wave equation `u_tt - u_xx = f(u)` on
//! `(0, π)` with Dirichlet conditions, via a reduced profile ODE for the
//! resonant bifurcation equation.

pub mod bifurcation;
pub mod elliptic;
pub mod galerkin;
pub mod error;
pub mod linearization;
pub mod ode;
pub mod precise;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
