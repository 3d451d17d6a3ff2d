//! Numerical laboratory for the partially thermostated Kac model.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`model`] parameter and state types, the collision and thermostat maps,
//!   Hermite polynomials and the angular moment coefficients.
//! * [`sim`] exact event-driven simulation of the jump process over ensembles.
//! * [`grid`] deterministic evolution of the two-particle master equation on
//!   tensor grids, together with the averaging operators and entropy.
//! * [`spectral`] the exact two-particle spectrum and Hermite–Galerkin gaps.
//! * [`entropy`] the entropy decay envelope and the inequality checks.
//! * [`vanhove`] the weak-coupling limit of the two-particle system.

pub mod entropy;
pub mod error;
pub mod grid;
pub mod model;
pub mod quadrature;
pub mod sim;
pub mod spectral;
pub mod vanhove;

pub use error::{Error, Result};
pub use model::{ModelParams, VelocityState};
