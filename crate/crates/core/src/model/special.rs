use crate::error::{Error, Result};

/// Largest total index accepted by [`gamma_coefficient`].
pub const GAMMA_INDEX_CAP: usize = 64;

pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// ln((2a−1)!!) with (−1)!! = 1.
fn ln_odd_double_factorial(a: usize) -> f64 {
    ln_factorial(2 * a) - a as f64 * std::f64::consts::LN_2 - ln_factorial(a)
}

/// Angular moment Γ(a1,a2) = (2a1−1)!!(2a2−1)!!/(2^n n!), n = a1 + a2.
///
/// Equal to the average of cos^{2a1}θ sin^{2a2}θ over the circle.
pub fn gamma_coefficient(a1: usize, a2: usize) -> Result<f64> {
    gamma_coefficient_capped(a1, a2, GAMMA_INDEX_CAP)
}

pub fn gamma_coefficient_capped(a1: usize, a2: usize, cap: usize) -> Result<f64> {
    let n = a1 + a2;
    if n > cap {
        return Err(Error::InvalidInput(format!("gamma index {a1}+{a2} exceeds cap {cap}")));
    }
    let ln = ln_odd_double_factorial(a1) + ln_odd_double_factorial(a2)
        - n as f64 * std::f64::consts::LN_2
        - ln_factorial(n);
    Ok(ln.exp())
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// Monic Hermite polynomial orthogonal under the unit Gaussian.
pub fn hermite_monic(n: usize, v: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = v * cur - k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Values of ψ_k = H_k/√k! for k = 0..=n_max at `v`.
pub fn hermite_orthonormal_table(n_max: usize, v: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(v);
    }
    for k in 1..n_max {
        let next = (v * out[k] - (k as f64).sqrt() * out[k - 1]) / ((k + 1) as f64).sqrt();
        out.push(next);
    }
    out
}
