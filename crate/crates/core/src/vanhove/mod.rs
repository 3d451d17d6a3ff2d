//! Weak-coupling limit of the two-particle system.
//!
//! In rescaled time τ = λt the two-particle density obeys
//! ∂f/∂τ = −2(I − Q₁₂)f − κ(I − R₁)f with κ = μ/λ. As λ → 0 the thermostated
//! coordinate is pinned to the bath and the free one follows the weak
//! thermostat U.

mod dyson;
mod evolve;
mod identity;
mod study;

use serde::{Deserialize, Serialize};

use crate::grid::QuadratureConfig;

pub use dyson::{dyson_tail_bound, dyson_truncated, DYSON_MAX_ORDER, DYSON_NODES};
pub use evolve::{evolve_rescaled, thermostat_flow, weak_limit_reference};
pub use identity::{
    operator_identity_check, relaxation_bound_check, three_particle_identity_check, IdentityCase, IdentityReport,
    RelaxationCheck,
};
pub use study::{convergence_study, ConvergencePoint, ConvergenceReport, VanHoveStudyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledOptions {
    pub quadrature: QuadratureConfig,
    pub beta: f64,
    /// Step in rescaled time.
    pub dt: f64,
    pub step_budget: usize,
}

impl Default for RescaledOptions {
    fn default() -> Self {
        Self { quadrature: QuadratureConfig::default(), beta: 1.0, dt: 0.02, step_budget: 100_000 }
    }
}
