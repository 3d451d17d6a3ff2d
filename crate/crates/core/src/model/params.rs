use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rate constants and sizes of the partially thermostated Kac system.
///
/// Particles `0..n_thermostated` (zero-based) are coupled to the heat bath;
/// the remaining ones only collide with each other.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_particles: usize,
    pub n_thermostated: usize,
    /// Kac collision rate λ per particle (total pair rate is Nλ).
    pub kac_rate: f64,
    /// Thermostat rate μ per thermostated particle.
    pub thermostat_rate: f64,
    /// Inverse bath temperature β.
    pub inverse_temperature: f64,
}

impl ModelParams {
    pub fn new(
        n_particles: usize,
        n_thermostated: usize,
        kac_rate: f64,
        thermostat_rate: f64,
        inverse_temperature: f64,
    ) -> Result<Self> {
        let params = Self {
            n_particles,
            n_thermostated,
            kac_rate,
            thermostat_rate,
            inverse_temperature,
        };
        params.validate()?;
        Ok(params)
    }

    /// Unit-temperature parameters (β = 1).
    pub fn unit(n_particles: usize, n_thermostated: usize, kac_rate: f64, thermostat_rate: f64) -> Result<Self> {
        Self::new(n_particles, n_thermostated, kac_rate, thermostat_rate, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_particles == 0 {
            return Err(Error::InvalidParams("n_particles must be positive".into()));
        }
        if self.n_thermostated > self.n_particles {
            return Err(Error::InvalidParams(format!(
                "n_thermostated = {} exceeds n_particles = {}",
                self.n_thermostated, self.n_particles
            )));
        }
        for (name, rate) in [("kac_rate", self.kac_rate), ("thermostat_rate", self.thermostat_rate)] {
            if !rate.is_finite() || rate < 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and non-negative, got {rate}")));
            }
        }
        if !self.inverse_temperature.is_finite() || self.inverse_temperature <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "inverse_temperature must be finite and positive, got {}",
                self.inverse_temperature
            )));
        }
        Ok(())
    }

    /// Validates and additionally requires N ≥ 2 (pair collisions).
    pub fn validate_pairs(&self) -> Result<()> {
        self.validate()?;
        if self.n_particles < 2 {
            return Err(Error::InvalidParams("pair collisions need n_particles >= 2".into()));
        }
        Ok(())
    }

    /// Validates the proper partially thermostated regime 1 ≤ m < N.
    pub fn validate_partial(&self) -> Result<()> {
        self.validate_pairs()?;
        if self.n_thermostated == 0 || self.n_thermostated >= self.n_particles {
            return Err(Error::InvalidParams(format!(
                "need 1 <= m < N, got N = {}, m = {}",
                self.n_particles, self.n_thermostated
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> f64 {
        self.n_particles as f64
    }

    pub fn m(&self) -> f64 {
        self.n_thermostated as f64
    }

    /// Total Kac collision rate Nλ.
    pub fn collision_rate(&self) -> f64 {
        self.n() * self.kac_rate
    }

    /// Total thermostat rate mμ.
    pub fn bath_rate(&self) -> f64 {
        self.m() * self.thermostat_rate
    }

    pub fn total_rate(&self) -> f64 {
        self.collision_rate() + self.bath_rate()
    }

    /// Equilibrium kinetic energy N/(2β) under K = ½Σv².
    pub fn equilibrium_kinetic_energy(&self) -> f64 {
        self.n() / (2.0 * self.inverse_temperature)
    }

    /// Same system expressed in β = 1 units: velocities scale by √β, rates are unchanged.
    pub fn normalized(&self) -> Self {
        Self { inverse_temperature: 1.0, ..*self }
    }
}

/// Velocities of the N particles. Index `k < m` is thermostated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityState(Vec<f64>);

impl VelocityState {
    pub fn new(velocities: Vec<f64>) -> Result<Self> {
        if let Some((k, v)) = velocities.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidState(format!("velocity {k} is not finite ({v})")));
        }
        Ok(Self(velocities))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn check_against(&self, params: &ModelParams) -> Result<()> {
        if self.0.len() != params.n_particles {
            return Err(Error::InvalidState(format!(
                "state has {} velocities, params expect {}",
                self.0.len(),
                params.n_particles
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_degenerate_thermostat_counts() {
        assert!(ModelParams::unit(4, 0, 1.0, 1.0).is_ok());
        assert!(ModelParams::unit(4, 4, 1.0, 1.0).is_ok());
        assert!(ModelParams::unit(4, 5, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(ModelParams::new(2, 1, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(2, 1, 1.0, f64::NAN, 1.0).is_err());
        assert!(ModelParams::new(2, 1, 1.0, 1.0, 0.0).is_err());
        assert!(ModelParams::unit(1, 0, 1.0, 1.0).unwrap().validate_pairs().is_err());
    }

    #[test]
    fn state_rejects_non_finite() {
        assert!(VelocityState::new(vec![0.0, f64::INFINITY]).is_err());
        let s = VelocityState::new(vec![1.0, 2.0]).unwrap();
        assert!(s.check_against(&ModelParams::unit(3, 1, 1.0, 1.0).unwrap()).is_err());
    }
}
