use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quadrature::tanh_sinh;

/// The two rates of the entropy decay bound.
///
/// δ± are the roots of x² − (Nλ+μ)x + mλμ/(N−1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayBound {
    pub delta_minus: f64,
    pub delta_plus: f64,
    pub params: ModelParams,
}

impl DecayBound {
    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate_pairs()?;
        if params.n_thermostated >= params.n_particles {
            return Err(Error::InvalidParams(format!(
                "need m < N, got m = {}, N = {}",
                params.n_thermostated, params.n_particles
            )));
        }
        let sum = params.n() * params.kac_rate + params.thermostat_rate;
        let prod = params.m() * params.kac_rate * params.thermostat_rate / (params.n() - 1.0);
        let disc = (sum * sum - 4.0 * prod).max(0.0);
        let delta_minus = if prod > 0.0 { 2.0 * prod / (sum + disc.sqrt()) } else { 0.0 };
        Ok(Self { delta_minus, delta_plus: sum - delta_minus, params: *params })
    }

    pub fn sum(&self) -> f64 {
        self.params.n() * self.params.kac_rate + self.params.thermostat_rate
    }

    pub fn product(&self) -> f64 {
        self.params.m() * self.params.kac_rate * self.params.thermostat_rate / (self.params.n() - 1.0)
    }

    /// D(t) = (δ₊e^{−δ₋t} − δ₋e^{−δ₊t})/(δ₊ − δ₋), with the limit (1+δt)e^{−δt} at equal roots.
    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = (self.delta_minus, self.delta_plus);
        let gap = hi - lo;
        // e^{−δ₋t}(1 + δ₋(1 − e^{−(δ₊−δ₋)t})/(δ₊−δ₋))
        let frac = if gap > 0.0 { -(-gap * t).exp_m1() / gap } else { t };
        (-lo * t).exp() * (1.0 + lo * frac)
    }

    /// dD/dt.
    pub fn derivative(&self, t: f64) -> f64 {
        let (lo, hi) = (self.delta_minus, self.delta_plus);
        let gap = hi - lo;
        let frac = if gap > 0.0 { -(-gap * t).exp_m1() / gap } else { t };
        -lo * hi * (-lo * t).exp() * frac
    }

    /// The Laplace transform of e^{Nλt}D(t) in closed form.
    pub fn laplace_closed(&self, s: f64) -> f64 {
        let p = &self.params;
        let (nl, mu) = (p.n() * p.kac_rate, p.thermostat_rate);
        let c0 = nl * mu * (1.0 - p.m() / (p.n() * (p.n() - 1.0)));
        (s + mu) / (s * s + (mu - nl) * s - c0)
    }

    /// Coefficients (b, c) of the denominator s² + b s + c.
    fn denominator(&self) -> (f64, f64) {
        let p = &self.params;
        let (nl, mu) = (p.n() * p.kac_rate, p.thermostat_rate);
        (mu - nl, -nl * mu * (1.0 - p.m() / (p.n() * (p.n() - 1.0))))
    }
}

pub fn decay_bound_d(bound: &DecayBound, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidInput(format!("time must be non-negative, got {t}")));
    }
    Ok(bound.eval(t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceReport {
    /// Max distance between Nλ−δ∓ and the denominator roots.
    pub root_error: f64,
    /// (s, numeric, closed form).
    pub samples: Vec<(f64, f64, f64)>,
    pub max_relative_error: f64,
    pub pass: bool,
}

/// Checks the closed-form Laplace transform against the decay bound.
pub fn laplace_consistency(bound: &DecayBound) -> LaplaceReport {
    let p = &bound.params;
    let nl = p.n() * p.kac_rate;
    let (b, c) = bound.denominator();
    // Stable quadratic roots.
    let disc = (b * b - 4.0 * c).max(0.0).sqrt();
    let big = -0.5 * (b + b.signum() * disc);
    let roots = if big != 0.0 {
        let (r1, r2) = (big, c / big);
        (r1.max(r2), r1.min(r2))
    } else {
        (0.0, 0.0)
    };
    // Nλ − δ₋ is the larger root.
    let root_error = (roots.0 - (nl - bound.delta_minus)).abs().max((roots.1 - (nl - bound.delta_plus)).abs());

    let scale = bound.sum().max(1e-3);
    let samples: Vec<(f64, f64, f64)> = [0.25, 0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&k| {
            let s = nl + k * scale;
            // Integrand e^{−(s−Nλ)t}D(t); truncate where it is below 1e−17.
            let rate = s - nl + bound.delta_minus;
            let horizon = 40.0 / rate;
            let numeric = tanh_sinh(|t| (-(s - nl) * t).exp() * bound.eval(t), 0.0, horizon, 1e-14);
            (s, numeric, bound.laplace_closed(s))
        })
        .collect();
    let max_relative_error = samples.iter().map(|&(_, a, b)| ((a - b) / b).abs()).fold(0.0, f64::max);
    LaplaceReport { root_error, samples, max_relative_error, pass: root_error < 1e-10 && max_relative_error < 1e-6 }
}
