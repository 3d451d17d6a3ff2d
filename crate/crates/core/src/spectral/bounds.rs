use serde::{Deserialize, Serialize};

use super::closed_form::gap_2_1;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Absolute slack on the bound comparisons.
pub const GAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapBoundReport {
    pub gap: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_ok: bool,
    /// Informational: the upper bound is only asserted for large N.
    pub upper_ok: bool,
    /// Decided by the lower bound alone.
    pub pass: bool,
    pub tol: f64,
}

/// Compares a gap estimate with (m/(N−1))·Δ₂,₁ from below and (m/(N−1))·2λμ/(λ+μ) from above.
pub fn check_gap_bounds(params: &ModelParams, gap: f64) -> Result<GapBoundReport> {
    params.validate_partial()?;
    let (lambda, mu) = (params.kac_rate, params.thermostat_rate);
    if !(lambda > 0.0 && mu > 0.0) {
        return Err(Error::InvalidParams(format!("need λ, μ > 0, got λ = {lambda}, μ = {mu}")));
    }
    let ratio = params.m() / (params.n() - 1.0);
    let lower = ratio * gap_2_1(lambda, mu);
    let upper = ratio * 2.0 * lambda * mu / (lambda + mu);
    let lower_ok = gap >= lower - GAP_TOL;
    let upper_ok = gap <= upper + GAP_TOL;
    Ok(GapBoundReport { gap, lower, upper, lower_ok, upper_ok, pass: lower_ok, tol: GAP_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
        let r = check_gap_bounds(&p, gap_2_1(1.0, 1.0)).unwrap();
        assert!(r.pass && r.upper_ok);
        assert!((r.lower - gap_2_1(1.0, 1.0)).abs() < 1e-15);
        assert!((r.lower - r.upper * gap_2_1(1.0, 1.0) * 2.0 / 2.0).abs() < 1e-15);

        let p = ModelParams::unit(10, 3, 1.0, 1.0).unwrap();
        let r = check_gap_bounds(&p, 0.2).unwrap();
        assert!((r.lower - 3.0 * gap_2_1(1.0, 1.0) / 9.0).abs() < 1e-15);
        assert!((r.upper - 3.0 / 9.0).abs() < 1e-15);

        let p = ModelParams::unit(2, 1, 1.0, 1e8).unwrap();
        let r = check_gap_bounds(&p, gap_2_1(1.0, 1e8)).unwrap();
        assert!(r.pass && r.upper_ok);
    }

    #[test]
    fn rejects_below_lower() {
        let p = ModelParams::unit(3, 1, 1.0, 1.0).unwrap();
        assert!(!check_gap_bounds(&p, 0.0).unwrap().pass);
        assert!(check_gap_bounds(&ModelParams::unit(3, 1, 0.0, 1.0).unwrap(), 0.1).is_err());
    }
}
