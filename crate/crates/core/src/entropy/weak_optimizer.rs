use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::mixture_u;

/// Largest number of velocity nodes before the domain is considered too wide.
const MAX_POINTS: usize = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakOptimizer {
    pub delta: f64,
    pub entropy: f64,
    pub production: f64,
    /// production / entropy, in 1/time.
    pub ratio: f64,
    pub points: usize,
    pub theta_nodes: usize,
}

fn ln_gaussian(var: f64, v: f64) -> f64 {
    -0.5 * v * v / var - 0.5 * (std::f64::consts::TAU * var).ln()
}

/// Entropy and its rate of change under the weak thermostat for the two-temperature mixture
/// φ = (1−δ)M_x + δM_y, x = 1/(β(1−δ)), y = 1/(βδ).
///
/// Uφ is exact per angle (a mixture of centred Gaussians), averaged on midpoint
/// angle nodes; the velocity integrals use a trapezoid rule on a grid that
/// widens with the hot component.
pub fn weak_optimizer_ratio(delta: f64, beta: f64, eta: f64) -> Result<WeakOptimizer> {
    if !(delta > 1e-6 && delta < 0.4) {
        return Err(Error::InvalidInput(format!("δ must lie in (1e-6, 0.4), got {delta}")));
    }
    if !(beta > 0.0 && beta.is_finite() && eta >= 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParams(format!("need β > 0 and η ≥ 0, got β = {beta}, η = {eta}")));
    }
    let x = 1.0 / (beta * (1.0 - delta));
    let y = 1.0 / (beta * delta);
    let step = 0.1 / beta.sqrt();
    let half_width = 12.0 * y.sqrt();
    let points = (half_width / step).ceil() as usize + 1;
    if points > MAX_POINTS {
        return Err(Error::Domain(format!("{points} velocity nodes exceed the cap {MAX_POINTS}")));
    }
    // Angle resolution follows the width of the hot component near θ = π/2.
    let theta_nodes = 8 * ((40.0 * (y * beta).sqrt()).max(256.0) / 8.0).ceil() as usize;
    let components = [(1.0 - delta, x), (delta, y)];
    let rotated = mixture_u(&components, beta, theta_nodes);
    let (ln_a, ln_b) = ((1.0 - delta).ln(), delta.ln());

    // Even integrands: integrate over [0, L] and double. Terms are summed in
    // index order so the result does not depend on the thread pool.
    let terms: Vec<(f64, f64)> = (0..points)
        .into_par_iter()
        .map(|k| {
            let v = k as f64 * step;
            let w = if k == 0 || k == points - 1 { 0.5 * step } else { step };
            let (la, lb) = (ln_a + ln_gaussian(x, v), ln_b + ln_gaussian(y, v));
            let ln_phi = la.max(lb) + (-(la - lb).abs()).exp().ln_1p();
            let phi = ln_phi.exp();
            let log_ratio = ln_phi - ln_gaussian(1.0 / beta, v);
            let u_phi: f64 = rotated.iter().map(|&(wk, var)| wk * ln_gaussian(var, v).exp()).sum();
            (2.0 * w * phi * log_ratio, 2.0 * w * (u_phi - phi) * log_ratio)
        })
        .collect();
    let (entropy, production) = terms.iter().fold((0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1));
    let production = eta * production;
    Ok(WeakOptimizer { delta, entropy, production, ratio: production / entropy, points, theta_nodes })
}
