use serde::{Deserialize, Serialize};

use super::ops::discrete_maxwellian;
use super::{Axis, TensorGrid};
use crate::error::{Error, Result};

/// Tolerance on the unit-mass check.
const MASS_TOL: f64 = 1e-5;
/// Interpolation undershoot below this is an error; above it is clipped to 0.
const NEGATIVE_TOL: f64 = 1e-6;

/// How a density is factored against the equilibrium γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HConvention {
    /// f = γ(1 + h); equilibrium is h = 0.
    OnePlusH,
    /// f = γh; equilibrium is h = 1.
    Plain,
}

fn ln_gamma_at<const D: usize>(v: [f64; D], beta: f64) -> f64 {
    let norm = 0.5 * (beta / std::f64::consts::TAU).ln();
    v.iter().map(|x| norm - 0.5 * beta * x * x).sum()
}

fn check_sign(values: &[f64]) -> Result<()> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVE_TOL {
        return Err(Error::NegativeDensity { min });
    }
    Ok(())
}

#[inline]
fn x_ln_x_over(x: f64, ln_ref: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x.ln() - ln_ref)
    }
}

/// Relative entropy ∫ f log(f/γ) by the trapezoid rule.
///
/// `f` must have unit mass to 1e−5. Values in (−1e−6, 0) are treated as 0.
pub fn relative_entropy<const D: usize>(f: &TensorGrid<D>, beta: f64) -> Result<f64> {
    let mass = f.mass();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized { mass });
    }
    check_sign(f.values())?;
    let w = f.cell_weights();
    Ok(f.values()
        .iter()
        .zip(&w)
        .enumerate()
        .map(|(k, (&x, &wk))| wk * x_ln_x_over(x, ln_gamma_at(f.coords(k), beta)))
        .sum())
}

/// Pointwise ratio against the product Maxwellian.
pub fn h_representation<const D: usize>(f: &TensorGrid<D>, beta: f64, conv: HConvention) -> TensorGrid<D> {
    let mut out = f.clone();
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        let ratio = *v / ln_gamma_at(f.coords(k), beta).exp();
        *v = match conv {
            HConvention::OnePlusH => ratio - 1.0,
            HConvention::Plain => ratio,
        };
    }
    out
}

pub fn from_h_representation<const D: usize>(h: &TensorGrid<D>, beta: f64, conv: HConvention) -> TensorGrid<D> {
    let mut out = h.clone();
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        let gamma = ln_gamma_at(h.coords(k), beta).exp();
        *v = match conv {
            HConvention::OnePlusH => gamma * (1.0 + *v),
            HConvention::Plain => gamma * *v,
        };
    }
    out
}

/// Quadrature weights of the discrete equilibrium measure: trapezoid weights
/// times the per-axis normalized Maxwellian. They sum to one.
pub fn entropy_weights<const D: usize>(axis: Axis, beta: f64) -> Vec<f64> {
    let wg: Vec<f64> = axis.weights().iter().zip(discrete_maxwellian(&axis, beta)).map(|(w, g)| w * g).collect();
    let probe = TensorGrid::<D>::zeros(axis);
    let n = axis.points();
    (0..probe.len())
        .map(|mut flat| {
            let mut p = 1.0;
            for _ in 0..D {
                p *= wg[flat % n];
                flat /= n;
            }
            p
        })
        .collect()
}

/// Rescales `h` so that ∫ h γ = 1 under [`entropy_weights`].
pub fn normalize_h<const D: usize>(h: &TensorGrid<D>, beta: f64) -> Result<TensorGrid<D>> {
    let w = entropy_weights::<D>(h.axis(), beta);
    let mass: f64 = h.values().iter().zip(&w).map(|(a, b)| a * b).sum();
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::NotNormalized { mass });
    }
    Ok(h.scale(1.0 / mass))
}

/// Entropy ∫ h log h γ of a ratio function with ∫ h γ = 1.
pub fn gamma_weighted_entropy<const D: usize>(h: &TensorGrid<D>, beta: f64) -> Result<f64> {
    let w = entropy_weights::<D>(h.axis(), beta);
    let mass: f64 = h.values().iter().zip(&w).map(|(a, b)| a * b).sum();
    if (mass - 1.0).abs() > MASS_TOL {
        return Err(Error::NotNormalized { mass });
    }
    check_sign(h.values())?;
    Ok(h.values().iter().zip(&w).map(|(&x, &wk)| wk * x_ln_x_over(x, 0.0)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid2D, Grid3D};
    use crate::model::maxwellian_density as g;
    use proptest::prelude::*;

    fn axis() -> Axis {
        Axis::new(8.0, 257).unwrap()
    }

    #[test]
    fn equilibrium_has_zero_entropy() {
        let gamma = Grid2D::maxwellian(axis(), 1.0);
        assert!(relative_entropy(&gamma, 1.0).unwrap().abs() < 1e-8);
        let g3 = Grid3D::maxwellian(Axis::new(6.0, 41).unwrap(), 1.0).normalized().unwrap();
        assert!(relative_entropy(&g3, 1.0).unwrap().abs() < 1e-8);
    }

    #[test]
    fn gaussian_closed_form() {
        for temp in [0.5, 1.5, 2.0] {
            let f = Grid2D::maxwellian(axis(), 1.0 / temp);
            let s = relative_entropy(&f, 1.0).unwrap();
            let exact = temp - 1.0 - f64::ln(temp);
            assert!((s - exact).abs() < 1e-4, "T={temp}: {s} vs {exact}");
        }
    }

    #[test]
    fn error_paths() {
        let f = Grid2D::maxwellian(axis(), 1.0).scale(1.1);
        assert!(matches!(relative_entropy(&f, 1.0), Err(Error::NotNormalized { .. })));
        let mut f = Grid2D::maxwellian(axis(), 1.0);
        f.values_mut()[1000] = -1e-3;
        assert!(matches!(relative_entropy(&f, 1.0), Err(Error::NegativeDensity { .. })));
        let mut f = Grid2D::maxwellian(axis(), 1.0);
        f.values_mut()[0] = -1e-9;
        assert!(relative_entropy(&f, 1.0).is_ok());
    }

    #[test]
    fn h_conventions_at_equilibrium() {
        let gamma = Grid2D::maxwellian(axis(), 1.0);
        let h = h_representation(&gamma, 1.0, HConvention::OnePlusH);
        assert!(h.max_abs() < 1e-12);
        let h = h_representation(&gamma, 1.0, HConvention::Plain);
        assert!(h.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn discrete_equilibrium_entropy_of_one_is_zero() {
        let h = TensorGrid::<3>::from_fn(Axis::new(5.0, 21).unwrap(), |_| 1.0);
        assert!(gamma_weighted_entropy(&h, 1.0).unwrap().abs() < 1e-14);
        let w = entropy_weights::<3>(Axis::new(5.0, 21).unwrap(), 1.0);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn round_trip(a in -2.0f64..2.0, b in -2.0f64..2.0, s in 0.5f64..2.0) {
            let ax = Axis::new(8.0, 65).unwrap();
            let f = Grid2D::from_fn(ax, |v| g(1.0 / s, v[0] - a) * g(1.0, v[1] - b));
            for conv in [HConvention::OnePlusH, HConvention::Plain] {
                let back = from_h_representation(&h_representation(&f, 1.0, conv), 1.0, conv);
                for (x, y) in back.values().iter().zip(f.values()) {
                    prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
                }
            }
        }

        #[test]
        fn entropy_non_negative(a in -2.0f64..2.0, b in -2.0f64..2.0, s in 0.4f64..2.5) {
            let ax = Axis::new(8.0, 129).unwrap();
            let f = Grid2D::from_fn(ax, |v| g(1.0 / s, v[0] - a) * g(1.0, v[1] - b)).normalized().unwrap();
            prop_assert!(relative_entropy(&f, 1.0).unwrap() >= -1e-8);
        }
    }
}
