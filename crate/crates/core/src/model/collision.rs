use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::params::VelocityState;

/// Rotates the pair `(vi, vj)` by the scattering angle.
#[inline]
pub fn kac_collide(vi: f64, vj: f64, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    (vi * c + vj * s, -vi * s + vj * c)
}

#[inline]
pub fn standard_gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Draws a velocity from the bath Maxwellian at inverse temperature `beta`.
#[inline]
pub fn sample_maxwellian<R: Rng + ?Sized>(beta: f64, rng: &mut R) -> f64 {
    standard_gaussian(rng) / beta.sqrt()
}

/// One-dimensional Maxwellian density √(β/2π)·exp(−βv²/2).
#[inline]
pub fn maxwellian_density(beta: f64, v: f64) -> f64 {
    (beta / (2.0 * std::f64::consts::PI)).sqrt() * (-0.5 * beta * v * v).exp()
}

/// K = ½Σv². Equilibrium value is N/(2β).
pub fn kinetic_energy(state: &VelocityState) -> f64 {
    0.5 * state.sum_of_squares()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ulps(a: f64) -> f64 {
        a.abs().max(f64::MIN_POSITIVE) * f64::EPSILON
    }

    #[test]
    fn collision_examples() {
        assert_eq!(kac_collide(1.0, 0.0, 0.0), (1.0, 0.0));
        let (a, b) = kac_collide(1.0, 0.0, FRAC_PI_2);
        assert!(a.abs() < 1e-15 && (b + 1.0).abs() < 1e-15);
        let (a, b) = kac_collide(3.0, 4.0, 0.7);
        assert!((a * a + b * b - 25.0).abs() < 8.0 * ulps(25.0));
    }

    #[test]
    fn rotation_has_unit_determinant() {
        let theta = 1.234;
        let (a11, a21) = kac_collide(1.0, 0.0, theta);
        let (a12, a22) = kac_collide(0.0, 1.0, theta);
        assert!((a11 * a22 - a12 * a21 - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn energy_preserved(vi in -1e3f64..1e3, vj in -1e3f64..1e3, theta in 0.0..2.0 * PI) {
            let (a, b) = kac_collide(vi, vj, theta);
            let before = vi * vi + vj * vj;
            prop_assert!((a * a + b * b - before).abs() <= 8.0 * ulps(before));
        }

        #[test]
        fn inverse_rotation(vi in -1e3f64..1e3, vj in -1e3f64..1e3, theta in 0.0..2.0 * PI) {
            let (a, b) = kac_collide(vi, vj, theta);
            let (x, y) = kac_collide(a, b, -theta);
            let scale = vi.abs().max(vj.abs());
            prop_assert!((x - vi).abs() <= 8.0 * ulps(scale));
            prop_assert!((y - vj).abs() <= 8.0 * ulps(scale));
        }
    }

    fn moments(beta: f64, n: usize) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let v = sample_maxwellian(beta, &mut rng);
            s1 += v;
            s2 += v * v;
        }
        let mean = s1 / n as f64;
        (mean, s2 / n as f64 - mean * mean)
    }

    #[test]
    fn maxwellian_moments() {
        let (mean, var) = moments(1.0, 1_000_000);
        assert!(mean.abs() < 0.005, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "var {var}");
        let (_, var) = moments(4.0, 1_000_000);
        assert!((var - 0.25).abs() < 0.005, "var {var}");
    }

    #[test]
    fn kinetic_energy_convention() {
        assert_eq!(kinetic_energy(&VelocityState::zeros(3)), 0.0);
        assert_eq!(kinetic_energy(&VelocityState::new(vec![1.0, 1.0]).unwrap()), 1.0);
    }
}
