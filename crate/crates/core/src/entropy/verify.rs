use serde::{Deserialize, Serialize};

use super::decay::DecayBound;
use crate::error::{Error, Result};
use crate::grid::{relative_entropy, Grid2D, MasterStep, QuadratureConfig};
use crate::model::ModelParams;

/// Slack on step-to-step entropy increase.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub time: f64,
    pub entropy: f64,
    /// D(t)·S(0).
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayVerification {
    pub initial_entropy: f64,
    pub rows: Vec<DecayRow>,
    /// Entropy never increased by more than [`MONOTONE_TOL`] between steps.
    pub monotone: bool,
    /// Largest |mass − 1| seen; entropies are taken after renormalizing.
    pub max_mass_drift: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Evolves `f0` on the grid and compares its relative entropy with the decay bound.
///
/// `times` must be increasing; each is hit exactly. `dt` is an upper bound on the step.
pub fn verify_entropy_decay(
    f0: &Grid2D,
    params: &ModelParams,
    times: &[f64],
    dt: f64,
    q: &QuadratureConfig,
    tol: f64,
) -> Result<DecayVerification> {
    if params.n_particles != 2 || params.n_thermostated != 1 {
        return Err(Error::InvalidParams("entropy verification is for N = 2, m = 1".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidInput("times must be non-negative and increasing".into()));
    }
    let limit = 0.1 / (2.0 * params.kac_rate + params.thermostat_rate);
    if !(dt > 0.0 && dt <= limit * (1.0 + 1e-12)) {
        return Err(Error::InvalidInput(format!("dt = {dt} violates dt <= {limit}")));
    }
    let bound = DecayBound::new(params)?;
    let beta = params.inverse_temperature;
    let stepper = MasterStep::new(params, f0.axis(), q)?;
    let s0 = relative_entropy(f0, beta)?;
    let mut max_mass_drift = (f0.mass() - 1.0).abs();
    let mut entropy_of = |f: &Grid2D| -> Result<f64> {
        max_mass_drift = max_mass_drift.max((f.mass() - 1.0).abs());
        relative_entropy(&f.normalized()?, beta)
    };
    let mut f = f0.clone();
    let mut now = 0.0;
    let mut last = s0;
    let mut monotone = true;
    let mut rows = Vec::with_capacity(times.len());
    for &target in times {
        let span = target - now;
        let steps = (span / dt).ceil() as usize;
        for _ in 0..steps {
            f = stepper.rk4(&f, span / steps as f64);
            let s = entropy_of(&f)?;
            monotone &= s <= last + MONOTONE_TOL;
            last = s;
        }
        now = target;
        let entropy = last;
        let b = bound.eval(target) * s0;
        rows.push(DecayRow { time: target, entropy, bound: b, pass: entropy <= b + tol });
    }
    let pass = monotone && rows.iter().all(|r| r.pass);
    Ok(DecayVerification { initial_entropy: s0, rows, monotone, max_mass_drift, tol, pass })
}
