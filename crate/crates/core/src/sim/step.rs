use rand::Rng;

use crate::error::Result;
use crate::model::{kac_collide, sample_maxwellian, ModelParams, VelocityState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// Rotation of the pair `(i, j)` (zero-based, `i < j`).
    Kac { i: usize, j: usize, theta: f64 },
    /// Bath refresh of particle `k`.
    Thermostat { k: usize },
    /// Total rate is zero; nothing ever happens.
    Frozen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// `f64::INFINITY` when the process is frozen.
    pub waiting_time: f64,
    pub event: EventKind,
}

/// Exponential holding time at the total rate Nλ + mμ, or `None` when that rate is 0.
pub fn draw_waiting_time<R: Rng + ?Sized>(params: &ModelParams, rng: &mut R) -> Option<f64> {
    let rate = params.total_rate();
    if rate <= 0.0 {
        return None;
    }
    // 1 − U lies in (0, 1], so the logarithm is finite.
    let u: f64 = rng.random();
    Some(-(1.0 - u).ln() / rate)
}

/// Picks an event type proportionally to its rate and applies it in place.
pub fn fire_event<R: Rng + ?Sized>(state: &mut [f64], params: &ModelParams, rng: &mut R) -> EventKind {
    let kac = params.collision_rate();
    let total = params.total_rate();
    if total <= 0.0 {
        return EventKind::Frozen;
    }
    let n = params.n_particles;
    if rng.random::<f64>() * total < kac {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (i, j) = (i.min(j), i.max(j));
        let theta = rng.random::<f64>() * std::f64::consts::TAU;
        let (a, b) = kac_collide(state[i], state[j], theta);
        state[i] = a;
        state[j] = b;
        EventKind::Kac { i, j, theta }
    } else {
        let k = rng.random_range(0..params.n_thermostated);
        state[k] = sample_maxwellian(params.inverse_temperature, rng);
        EventKind::Thermostat { k }
    }
}

/// One jump of the chain: waiting time plus the event at its end.
pub fn step<R: Rng + ?Sized>(state: &mut VelocityState, params: &ModelParams, rng: &mut R) -> Result<StepOutcome> {
    params.validate_pairs()?;
    state.check_against(params)?;
    match draw_waiting_time(params, rng) {
        None => Ok(StepOutcome { waiting_time: f64::INFINITY, event: EventKind::Frozen }),
        Some(waiting_time) => {
            let event = fire_event(state.as_mut_slice(), params, rng);
            Ok(StepOutcome { waiting_time, event })
        }
    }
}

/// Fires `n_events` events, ignoring times. Returns (Kac count, thermostat count).
pub fn run_events<R: Rng + ?Sized>(
    state: &mut VelocityState,
    params: &ModelParams,
    n_events: usize,
    rng: &mut R,
) -> Result<(usize, usize)> {
    params.validate_pairs()?;
    state.check_against(params)?;
    let mut counts = (0, 0);
    for _ in 0..n_events {
        match fire_event(state.as_mut_slice(), params, rng) {
            EventKind::Kac { .. } => counts.0 += 1,
            EventKind::Thermostat { .. } => counts.1 += 1,
            EventKind::Frozen => break,
        }
    }
    Ok(counts)
}
