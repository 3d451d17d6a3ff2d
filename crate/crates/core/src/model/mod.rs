//! Parameters, states and the elementary maps shared by every other module.

mod collision;
mod params;
mod special;

pub use collision::{kac_collide, kinetic_energy, maxwellian_density, sample_maxwellian, standard_gaussian};
pub use params::{ModelParams, VelocityState};
pub use special::{
    binomial, gamma_coefficient, gamma_coefficient_capped, hermite_monic, hermite_orthonormal_table, ln_factorial,
    GAMMA_INDEX_CAP,
};
