use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{apply_p, gamma_weighted_entropy, normalize_h, Grid2D, QPlan, QuadratureConfig};
use crate::quadrature::tanh_sinh;

/// Largest offset accepted; beyond it the Gaussian tail underflows.
const MAX_OFFSET: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductionRatio {
    pub entropy: f64,
    pub entropy_thermostat: f64,
    pub entropy_kac: f64,
    /// [S(P₁h) + S(Qh)] / S(h).
    pub ratio: f64,
}

/// ln P(Z > x) for a standard normal Z.
fn ln_upper_tail(x: f64) -> f64 {
    (0.5 * libm::erfc(x / std::f64::consts::SQRT_2)).ln()
}

/// ln P(lo < Z < hi) for 0 ≤ lo < hi.
fn ln_band(lo: f64, hi: f64) -> f64 {
    let (a, b) = (ln_upper_tail(lo), ln_upper_tail(hi));
    a + (-(b - a).exp()).ln_1p()
}

/// Fraction of the circle of radius `r` inside [−a, a] × [c − a, c + a], c > a.
pub fn arc_fraction(r: f64, a: f64, c: f64) -> f64 {
    let lo = (r * r - (c + a).powi(2)).max(0.0);
    let hi = (a * a).min(r * r - (c - a).powi(2));
    if hi <= lo {
        return 0.0;
    }
    let asin = |x2: f64| (x2.sqrt() / r).min(1.0).asin();
    (asin(hi) - asin(lo)) / std::f64::consts::PI
}

/// The entropy-production ratio for h ∝ 1 on [−a, a] × [R − a, R + a].
///
/// S(h) and S(P₁h) are closed forms in Gaussian tail functions; S(Qh) is a
/// one-dimensional radial integral of the closed-form arc fraction.
pub fn production_counterexample_ratio(a: f64, offset: f64) -> Result<ProductionRatio> {
    if !(a > 0.0 && offset > 2.0 * a) {
        return Err(Error::InvalidInput(format!("need a > 0 and R > 2a, got a = {a}, R = {offset}")));
    }
    if offset + a > MAX_OFFSET {
        return Err(Error::Domain(format!("R + a = {} exceeds {MAX_OFFSET}", offset + a)));
    }
    let ln_core = (libm::erf(a / std::f64::consts::SQRT_2)).ln();
    let ln_band_mass = ln_band(offset - a, offset + a);
    let ln_box = ln_core + ln_band_mass;
    let entropy = -ln_box;
    let entropy_thermostat = -ln_band_mass;

    // S(Qh) = ∫ r e^{−r²/2} q ln q dr with q = frac(r)/γ(B).
    let integrand = |r: f64| {
        let frac = arc_fraction(r, a, offset);
        if frac <= 0.0 {
            return 0.0;
        }
        let ln_weight = r.ln() - 0.5 * r * r - ln_box;
        ln_weight.exp() * frac * (frac.ln() - ln_box)
    };
    let mut breaks = [offset - a, ((offset - a).powi(2) + a * a).sqrt(), offset + a, ((offset + a).powi(2) + a * a).sqrt()];
    breaks.sort_by(f64::total_cmp);
    let entropy_kac: f64 = breaks.windows(2).map(|w| tanh_sinh(integrand, w[0], w[1], 1e-13)).sum();
    Ok(ProductionRatio { entropy, entropy_thermostat, entropy_kac, ratio: (entropy_thermostat + entropy_kac) / entropy })
}

/// The same ratio for an arbitrary ratio function on a grid (∫hγ = 1).
pub fn production_ratio_grid(h: &Grid2D, beta: f64, q: &QuadratureConfig) -> Result<ProductionRatio> {
    let entropy = gamma_weighted_entropy(h, beta)?;
    if entropy.abs() < 1e-12 {
        return Err(Error::UndefinedRatio);
    }
    let entropy_thermostat = gamma_weighted_entropy(&apply_p(h, 0, beta), beta)?;
    let averaged = QPlan::new(h.axis(), q)?.apply(h);
    // Q conserves ∫hγ; remove the discrete defect before taking the entropy.
    let entropy_kac = gamma_weighted_entropy(&normalize_h(&averaged, beta)?, beta)?;
    Ok(ProductionRatio { entropy, entropy_thermostat, entropy_kac, ratio: (entropy_thermostat + entropy_kac) / entropy })
}
