//! Quadrature, derivative couplings and ODE integration.

pub mod coupling;
pub mod ode;
pub mod quadrature;

pub use coupling::{coupling_matrix, CouplingCache, CouplingMatrix};
pub use ode::{ode_solve, ode_solve_observed, DenseStep, DenseTrajectory, IntegratorConfig, OdeComponent, StepObserver};
pub use quadrature::{gauss_legendre, inner_product, QuadratureRule};
