//! Supersymmetric partner hierarchy of the expanding infinite box.
//!
//! The crate builds the hierarchy `H^(α)` in closed form, evolves its
//! eigenstates through a finite-time width ramp in the instantaneous
//! eigenbasis, with or without the counterdiabatic term, and evaluates
//! fidelity, Bures angle, excess energy, the cost of the shortcut and the
//! associated quantum speed limits.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod dynamics;
pub mod error;
pub mod hierarchy;
pub mod jet;
pub mod numerics;
pub mod observables;
pub mod ramp;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type PhysicalUnits64 = hierarchy::PhysicalUnits<f64>;
pub type HierarchySpec64 = hierarchy::HierarchySpec<f64>;
pub type Eigenstate64 = hierarchy::ScaledEigenstate<f64>;
pub type Rule64 = numerics::QuadratureRule<f64>;
pub type Coupling64 = numerics::CouplingMatrix<f64>;
pub type IntegratorConfig64 = numerics::IntegratorConfig<f64>;
pub type SmootherStep64 = ramp::SmootherStep<f64>;
pub type BasisState64 = dynamics::BasisState<f64>;
pub type TrajectoryRecord64 = dynamics::TrajectoryRecord<f64>;
pub type QslReport64 = observables::QslReport<f64>;
