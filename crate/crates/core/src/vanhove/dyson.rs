use rayon::prelude::*;

use super::evolve::thermostat_flow;
use super::RescaledOptions;
use crate::error::{Error, Result};
use crate::grid::{apply_r1, Grid2D, QPlan};
use crate::quadrature::{chebyshev_integration_matrix, chebyshev_lobatto};

/// Collocation nodes per order for the time integrals.
pub const DYSON_NODES: usize = 32;
/// Highest order accepted.
pub const DYSON_MAX_ORDER: usize = 20;
/// The time integrals carry e^{κs}; beyond this κτ the polynomial fit loses accuracy.
const MAX_KAPPA_TAU: f64 = 10.0;

/// Σ_{k>K} (4τ)^k/k!, the L¹ bound on the omitted terms for unit-mass data.
pub fn dyson_tail_bound(tau: f64, order: usize) -> f64 {
    let x = 4.0 * tau;
    let mut term = 1.0;
    for k in 1..=order {
        term *= x / k as f64;
    }
    let mut tail = 0.0;
    for k in order + 1.. {
        term *= x / k as f64;
        tail += term;
        if term < 1e-18 * tail.max(f64::MIN_POSITIVE) && k as f64 > x {
            break;
        }
    }
    tail
}

/// Partial sum of the expansion of the rescaled evolution in powers of the Kac part
/// around the exact thermostat flow, through order `order`.
///
/// Term k is ∫₀^τ e^{−κ(τ−s)(I−R₁)} A c_{k−1}(s) ds with A = −2(I − Q); each
/// term is kept on Chebyshev–Lobatto nodes in time and integrated spectrally.
pub fn dyson_truncated(phi: &Grid2D, lambda: f64, mu: f64, tau: f64, order: usize, opts: &RescaledOptions) -> Result<Grid2D> {
    if order > DYSON_MAX_ORDER {
        return Err(Error::InvalidInput(format!("order {order} exceeds {DYSON_MAX_ORDER}")));
    }
    if !(lambda > 0.0 && lambda.is_finite() && mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParams(format!("need λ > 0 and μ ≥ 0, got λ = {lambda}, μ = {mu}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("τ must be non-negative, got {tau}")));
    }
    if tau == 0.0 {
        return Ok(phi.clone());
    }
    let kappa = mu / lambda;
    if kappa * tau > MAX_KAPPA_TAU {
        return Err(Error::Domain(format!("κτ = {} exceeds {MAX_KAPPA_TAU}", kappa * tau)));
    }
    let beta = opts.beta;
    let times = chebyshev_lobatto(DYSON_NODES, tau);
    let integrate = chebyshev_integration_matrix(DYSON_NODES, tau);
    let plan = QPlan::new(phi.axis(), &opts.quadrature)?;

    let mut term: Vec<Grid2D> = times.iter().map(|&t| thermostat_flow(phi, (-kappa * t).exp(), beta)).collect();
    let mut sum = term[DYSON_NODES - 1].clone();
    for _ in 0..order {
        // Y(s) = e^{κs}(X − R₁X), Z(s) = R₁X, X = A c_{k−1}(s).
        let parts: Vec<(Grid2D, Grid2D)> = term
            .par_iter()
            .zip(&times)
            .map(|(c, &s)| {
                let x = plan.apply(c).add_scaled(-1.0, c).scale(2.0);
                let z = apply_r1(&x, beta);
                (x.add_scaled(-1.0, &z).scale((kappa * s).exp()), z)
            })
            .collect();
        term = (0..DYSON_NODES)
            .into_par_iter()
            .map(|i| {
                let mut out = Grid2D::zeros(phi.axis());
                let damp = (-kappa * times[i]).exp();
                for (j, (y, z)) in parts.iter().enumerate() {
                    let w = integrate[(i, j)];
                    if w != 0.0 {
                        out = out.add_scaled(w * damp, y).add_scaled(w, z);
                    }
                }
                out
            })
            .collect();
        sum = sum.add_scaled(1.0, &term[DYSON_NODES - 1]);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;
    use crate::model::maxwellian_density as g;
    use crate::vanhove::evolve_rescaled;

    fn phi() -> Grid2D {
        let axis = Axis::new(8.0, 129).unwrap();
        Grid2D::from_fn(axis, |v| g(1.0, v[0] - 0.8) * g(0.6, v[1] + 0.5)).normalized().unwrap()
    }

    #[test]
    fn tail_bound_values() {
        assert!((dyson_tail_bound(0.5, 0) - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!(dyson_tail_bound(0.5, 15) < 1e-6);
        assert!(dyson_tail_bound(0.5, 15) > 2f64.powi(16) / 20_922_789_888_000.0);
    }

    #[test]
    fn zero_order_is_the_thermostat_flow() {
        let f = phi();
        let opts = RescaledOptions::default();
        let (lambda, mu, tau) = (0.5, 1.0, 0.7);
        let out = dyson_truncated(&f, lambda, mu, tau, 0, &opts).unwrap();
        let decay = (-mu * tau / lambda).exp();
        let expected = f.add_scaled(1.0 - decay, &apply_r1(&f, 1.0).add_scaled(-1.0, &f));
        assert!(out.max_abs_diff(&expected) < 1e-14);
        assert_eq!(dyson_truncated(&f, lambda, mu, 0.0, 7, &opts).unwrap(), f);
    }

    #[test]
    fn high_order_matches_direct_evolution() {
        let f = phi();
        let opts = RescaledOptions::default();
        let direct = evolve_rescaled(&f, 1.0, 1.0, 0.5, &opts).unwrap();
        let series = dyson_truncated(&f, 1.0, 1.0, 0.5, 15, &opts).unwrap();
        let d = series.l1_distance(&direct);
        assert!(d < 1e-4, "{d}");
        assert!((series.mass() - f.mass()).abs() < 1e-6);
        // Low orders are within their tail bounds.
        for k in [2, 4] {
            let partial = dyson_truncated(&f, 1.0, 1.0, 0.5, k, &opts).unwrap();
            assert!(partial.l1_distance(&direct) <= dyson_tail_bound(0.5, k) + 1e-6);
        }
    }

    #[test]
    fn guards() {
        let opts = RescaledOptions::default();
        assert!(dyson_truncated(&phi(), 1.0, 1.0, 0.5, 21, &opts).is_err());
        assert!(matches!(dyson_truncated(&phi(), 0.01, 1.0, 0.5, 3, &opts), Err(Error::Domain(_))));
    }
}
