//! Independent reference implementations used to validate the analytic path:
//! a master-equation integrator with pulse kicks and a characteristic
//! polynomial eigenvalue solver.

mod charpoly;
mod master;
mod ode;

pub use charpoly::{charpoly_coefficients, charpoly_eigenvalues, CHARPOLY_MAX_DIM};
pub use master::{evolve_density_matrix, fwm_via_ode};
pub use ode::{integrate, OdeConfig, OdeMethod, Rhs};
