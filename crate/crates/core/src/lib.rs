//! Exponential Runge-Kutta time integrators for the space-inhomogeneous
//! Boltzmann and BGK equations in stiff (small Knudsen number) regimes.
//!
//! The solver works on a 1D spatial grid with a 2D velocity grid. Two
//! integrator families are provided:
//!
//! - [`integrators::exprk_f_step`]: the equilibrium function is frozen over a
//!   step and obtained by advancing the compressible Euler system with the
//!   same Runge-Kutta tableau.
//! - [`integrators::exprk_v_step`]: the equilibrium is the time-varying local
//!   Maxwellian, with its time derivative rebuilt from transport moments.
//!
//! Both push the distribution onto the correct fluid limit as the Knudsen
//! number goes to zero without inverting the collision operator.

pub mod collision;
pub mod error;
pub mod euler_ref;
pub mod integrators;
pub mod linalg;
pub mod phase_space;
pub mod tableau;
pub mod transport;

pub use error::{Error, Result};
