use super::ops::{apply_r, QPlan};
use super::{Grid2D, QuadratureConfig};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Right-hand side of the two-particle master equation on a fixed grid:
/// `f' = −2λ(f − Q₁₂f) − μ Σ_{k≤m} (f − R_k f)`.
#[derive(Debug, Clone)]
pub struct MasterStep {
    plan: QPlan,
    params: ModelParams,
}

impl MasterStep {
    pub fn new(params: &ModelParams, axis: super::Axis, q: &QuadratureConfig) -> Result<Self> {
        params.validate()?;
        if params.n_particles != 2 {
            return Err(Error::InvalidParams(format!(
                "grid evolution is two-particle only, got N = {}",
                params.n_particles
            )));
        }
        Ok(Self { plan: QPlan::new(axis, q)?, params: *params })
    }

    pub fn rhs(&self, f: &Grid2D) -> Grid2D {
        let p = &self.params;
        let mut out = if p.kac_rate > 0.0 {
            let q = self.plan.apply(f);
            q.add_scaled(-1.0, f).scale(2.0 * p.kac_rate)
        } else {
            Grid2D::zeros(f.axis())
        };
        if p.thermostat_rate > 0.0 {
            for k in 0..p.n_thermostated {
                let r = apply_r(f, k, p.inverse_temperature);
                out = out.add_scaled(p.thermostat_rate, &r.add_scaled(-1.0, f));
            }
        }
        out
    }

    /// One classical RK4 step.
    pub fn rk4(&self, f: &Grid2D, dt: f64) -> Grid2D {
        let k1 = self.rhs(f);
        let k2 = self.rhs(&f.add_scaled(0.5 * dt, &k1));
        let k3 = self.rhs(&f.add_scaled(0.5 * dt, &k2));
        let k4 = self.rhs(&f.add_scaled(dt, &k3));
        f.add_scaled(dt / 6.0, &k1.add_scaled(2.0, &k2).add_scaled(2.0, &k3).add_scaled(1.0, &k4))
    }
}

/// Operator form of the right-hand side, for checks that need it directly.
pub fn master_generator(params: &ModelParams, f: &Grid2D, q: &QuadratureConfig) -> Result<Grid2D> {
    Ok(MasterStep::new(params, f.axis(), q)?.rhs(f))
}

fn check_step(params: &ModelParams, t_end: f64, dt: f64) -> Result<usize> {
    let limit = 0.1 / (2.0 * params.kac_rate + params.thermostat_rate);
    if !(dt.is_finite() && dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!("dt = {dt} violates dt <= 0.1/(2λ+μ) = {limit}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidInput(format!("t_end must be non-negative, got {t_end}")));
    }
    Ok((t_end / dt).ceil() as usize)
}

/// RK4 integration up to `t_end` with steps no longer than `dt`.
pub fn evolve_master(
    f0: &Grid2D,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    q: &QuadratureConfig,
) -> Result<Grid2D> {
    evolve_master_observed(f0, params, t_end, dt, q, |_, _| {})
}

/// As [`evolve_master`], calling `observe(t, f)` at t = 0 and after every step.
pub fn evolve_master_observed<F: FnMut(f64, &Grid2D)>(
    f0: &Grid2D,
    params: &ModelParams,
    t_end: f64,
    dt: f64,
    q: &QuadratureConfig,
    mut observe: F,
) -> Result<Grid2D> {
    let steps = check_step(params, t_end, dt)?;
    let stepper = MasterStep::new(params, f0.axis(), q)?;
    let mut f = f0.clone();
    observe(0.0, &f);
    if steps == 0 {
        return Ok(f);
    }
    let h = t_end / steps as f64;
    for s in 1..=steps {
        f = stepper.rk4(&f, h);
        observe(s as f64 * h, &f);
    }
    Ok(f)
}
