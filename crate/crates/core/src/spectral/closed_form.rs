use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{binomial, gamma_coefficient, ModelParams};

/// Gap of the two-particle, one-thermostat generator: the smaller root of
/// x² − (2λ+μ)x + λμ.
///
/// Evaluated as 2λμ / ((2λ+μ) + √(4λ²+μ²)) to avoid cancellation.
pub fn gap_2_1(lambda: f64, mu: f64) -> f64 {
    let sum = 2.0 * lambda + mu;
    if sum == 0.0 {
        return 0.0;
    }
    2.0 * lambda * mu / (sum + (4.0 * lambda * lambda + mu * mu).sqrt())
}

/// (x⁻, x⁺) for the invariant block of total degree 2n.
pub fn x_pair(lambda: f64, mu: f64, n: usize) -> Result<(f64, f64)> {
    let sum = 2.0 * lambda + mu;
    let prod = 2.0 * lambda * mu * (1.0 - gamma_coefficient(0, n)?);
    let root = (sum * sum - 4.0 * prod).max(0.0).sqrt();
    let plus = 0.5 * (sum + root);
    let minus = if plus > 0.0 { prod / plus } else { 0.0 };
    Ok((minus, plus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum SpectrumLabel {
    TwoLambdaPlusMu,
    TwoLambda,
    XPlus(usize),
    XMinus(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub eigenvalue: f64,
    pub label: SpectrumLabel,
    /// Monic Hermite coefficients `((deg v₁, deg v₂), c)`; empty for the
    /// degenerate eigenvalues.
    pub eigenfunction_coeffs: Vec<((usize, usize), f64)>,
}

/// The complete list of distinct eigenvalues for N = 2, m = 1 up to block index `n_max`.
pub fn exact_spectrum_2_1(lambda: f64, mu: f64, n_max: usize) -> Result<Vec<SpectrumRecord>> {
    if !(lambda > 0.0 && mu > 0.0 && lambda.is_finite() && mu.is_finite()) {
        return Err(Error::InvalidParams(format!("need λ, μ > 0, got λ = {lambda}, μ = {mu}")));
    }
    if n_max > 40 {
        return Err(Error::InvalidInput(format!("n_max = {n_max} exceeds 40")));
    }
    let mut out = vec![
        SpectrumRecord { eigenvalue: 2.0 * lambda + mu, label: SpectrumLabel::TwoLambdaPlusMu, eigenfunction_coeffs: vec![] },
        SpectrumRecord { eigenvalue: 2.0 * lambda, label: SpectrumLabel::TwoLambda, eigenfunction_coeffs: vec![] },
    ];
    for n in 1..=n_max {
        let (minus, plus) = x_pair(lambda, mu, n)?;
        for (x, other, label) in [(plus, minus, SpectrumLabel::XPlus(n)), (minus, plus, SpectrumLabel::XMinus(n))] {
            let coeffs = (0..=n)
                .map(|i| {
                    let c = if i == 0 { 2.0 * lambda / (2.0 * lambda - x) } else { 2.0 * lambda * binomial(n, i) / other };
                    ((2 * i, 2 * n - 2 * i), c)
                })
                .collect();
            out.push(SpectrumRecord { eigenvalue: x, label, eigenfunction_coeffs: coeffs });
        }
    }
    Ok(out)
}

/// Monic coefficients (on H₂(v₁), on H₂(v₂)) of the gap eigenfunction for N = 2, m = 1.
pub fn gap_eigenvector_2_1(lambda: f64, mu: f64) -> (f64, f64) {
    let gap = gap_2_1(lambda, mu);
    (2.0 * lambda / (2.0 * lambda + mu - gap), 2.0 * lambda / (2.0 * lambda - gap))
}

/// Action of the generator on span{Σ_{k>m} H₂(v_k), Σ_{k≤m} H₂(v_k)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeTwo {
    pub matrix: [[f64; 2]; 2],
    pub smallest_closed_form: f64,
    /// Smallest eigenvalue from a general (Schur) eigensolve of `matrix`.
    pub smallest_numeric: f64,
}

pub fn degree_two_matrix(params: &ModelParams) -> Result<DegreeTwo> {
    params.validate_partial()?;
    let (n, m) = (params.n(), params.m());
    let (lambda, mu) = (params.kac_rate, params.thermostat_rate);
    let matrix = [
        [lambda * m / (n - 1.0), -lambda * m / (n - 1.0)],
        [-lambda * (n - m) / (n - 1.0), lambda * (n - m) / (n - 1.0) + mu],
    ];
    let a = mu + n * lambda / (n - 1.0);
    let x = 4.0 * m * lambda * mu / (n - 1.0) / (a * a);
    // a/2·(1 − √(1 − x)) without cancellation
    let smallest_closed_form = if a > 0.0 { 0.5 * a * x / (1.0 + (1.0 - x).max(0.0).sqrt()) } else { 0.0 };
    let m2 = Matrix2::new(matrix[0][0], matrix[0][1], matrix[1][0], matrix[1][1]);
    let smallest_numeric = m2
        .eigenvalues()
        .map(|ev| ev.min())
        .ok_or_else(|| Error::InvalidInput("degree-two block has complex eigenvalues".into()))?;
    Ok(DegreeTwo { matrix, smallest_closed_form, smallest_numeric })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hermite_monic;

    #[test]
    fn gap_examples() {
        let gap = gap_2_1(1.0, 1.0);
        assert!((gap - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((gap * gap - 3.0 * gap + 1.0).abs() < 1e-14);
        assert_eq!(gap_2_1(0.0, 2.0), 0.0);
        assert_eq!(gap_2_1(2.0, 0.0), 0.0);
        for (l, m) in [(0.3, 2.0), (5.0, 0.1), (1.0, 1e6)] {
            let g = gap_2_1(l, m);
            let direct = 0.5 * ((2.0 * l + m) - (4.0 * l * l + m * m).sqrt());
            assert!((g - direct).abs() < 1e-9 * direct.max(1.0));
        }
    }

    #[test]
    fn large_mu_limit_bounded() {
        // Δ → λ as μ → ∞
        let g = gap_2_1(1.0, 1e8);
        assert!(g < 2.0 && (g - 1.0).abs() < 1e-7);
    }

    #[test]
    fn spectrum_structure() {
        let spec = exact_spectrum_2_1(1.0, 1.0, 40).unwrap();
        let min = spec.iter().map(|r| r.eigenvalue).fold(f64::INFINITY, f64::min);
        assert!((min - gap_2_1(1.0, 1.0)).abs() < 1e-12);
        let mut prev = 0.0;
        for n in 1..=40 {
            let (minus, plus) = x_pair(1.0, 1.0, n).unwrap();
            assert!((minus + plus - 3.0).abs() < 1e-12);
            assert!(minus < plus && minus > prev);
            prev = minus;
        }
        assert!(exact_spectrum_2_1(1.0, 1.0, 41).is_err());
        assert!(exact_spectrum_2_1(0.0, 1.0, 3).is_err());
    }

    /// The generator applied to a monic Hermite combination, evaluated pointwise
    /// by quadrature over the angle.
    fn apply_generator(coeffs: &[((usize, usize), f64)], lambda: f64, mu: f64, v1: f64, v2: f64) -> f64 {
        let h = |a: f64, b: f64| coeffs.iter().map(|&((i, j), c)| c * hermite_monic(i, a) * hermite_monic(j, b)).sum::<f64>();
        let n = 256;
        let q = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                h(v1 * t.cos() + v2 * t.sin(), -v1 * t.sin() + v2 * t.cos())
            })
            .sum::<f64>()
            / n as f64;
        // P₁ kills every term with a v₁-degree > 0
        let p: f64 = coeffs.iter().filter(|((i, _), _)| *i == 0).map(|&((_, j), c)| c * hermite_monic(j, v2)).sum();
        let hv = h(v1, v2);
        2.0 * lambda * (hv - q) + mu * (hv - p)
    }

    #[test]
    fn coefficient_records_are_eigenfunctions() {
        let (lambda, mu) = (0.7, 1.3);
        for rec in exact_spectrum_2_1(lambda, mu, 4).unwrap().iter().skip(2) {
            for (v1, v2) in [(0.3, -1.1), (1.7, 0.4), (-0.9, 2.2)] {
                let lhs = apply_generator(&rec.eigenfunction_coeffs, lambda, mu, v1, v2);
                let h: f64 = rec
                    .eigenfunction_coeffs
                    .iter()
                    .map(|&((i, j), c)| c * hermite_monic(i, v1) * hermite_monic(j, v2))
                    .sum();
                assert!((lhs - rec.eigenvalue * h).abs() < 1e-9 * (1.0 + h.abs()), "{:?}", rec.label);
            }
        }
    }

    #[test]
    fn degree_two_examples() {
        let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
        let d = degree_two_matrix(&p).unwrap();
        assert_eq!(d.matrix, [[1.0, -1.0], [-1.0, 2.0]]);
        assert!((d.smallest_closed_form - gap_2_1(1.0, 1.0)).abs() < 1e-14);
        let p = ModelParams::unit(100, 10, 1.0, 1.0).unwrap();
        let d = degree_two_matrix(&p).unwrap();
        assert!((d.smallest_closed_form - d.smallest_numeric).abs() < 1e-12);
        let p = ModelParams::unit(5, 2, 1.0, 0.0).unwrap();
        assert_eq!(degree_two_matrix(&p).unwrap().smallest_closed_form, 0.0);
        assert!(degree_two_matrix(&ModelParams::unit(3, 3, 1.0, 1.0).unwrap()).is_err());
    }
}
