use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::trajectory_rng;
use crate::grid::{apply_p, entropy_weights, gamma_weighted_entropy, normalize_h, Axis, QPlan, QuadratureConfig, TensorGrid};

/// Default slack on entropy comparisons at grid resolution.
pub const LEMMA_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaConfig {
    pub thermostat_rate: f64,
    pub times: Vec<f64>,
    pub beta: f64,
    pub tol: f64,
    pub quadrature: QuadratureConfig,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { thermostat_rate: 1.0, times: vec![0.1, 1.0, 10.0], beta: 1.0, tol: LEMMA_TOL, quadrature: QuadratureConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// Σ_{j≥2} S(P₁Q₁ⱼh) ≤ (N − 3/2)S(h).
    PairContraction,
    /// Σ_j S(P_j h) ≤ (N−1)S(h).
    Han,
    /// Single thermostat semigroup after Q.
    OneThermostat,
    /// m thermostats after Q.
    ManyThermostats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub kind: LemmaKind,
    pub time: Option<f64>,
    pub thermostats: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub n_particles: usize,
    pub entropy: f64,
    pub entries: Vec<LemmaEntry>,
    pub pass: bool,
}

fn rotation_average<const D: usize>(plan: &QPlan, h: &TensorGrid<D>, i: usize, j: usize, beta: f64) -> Result<TensorGrid<D>> {
    let values = match D {
        2 => plan.apply_slice(h.values()),
        3 => {
            let g3 = TensorGrid::<3>::from_values(h.axis(), h.values().to_vec())?;
            plan.apply_pair(&g3, i, j).into_values()
        }
        _ => return Err(Error::InvalidInput(format!("lemma checks need 2 or 3 coordinates, got {D}"))),
    };
    // Q conserves ∫hγ; remove the discrete defect so entropies compare like with like.
    normalize_h(&TensorGrid::from_values(h.axis(), values)?, beta)
}

/// e^{μ(P_k − I)t} = e^{−μt} + (1 − e^{−μt})P_k, since P_k is a projection.
fn thermostat_semigroup<const D: usize>(h: &TensorGrid<D>, k: usize, decay: f64, beta: f64) -> TensorGrid<D> {
    apply_p(h, k, beta).scale(1.0 - decay).add_scaled(decay, h)
}

/// Evaluates the entropy inequalities for one ratio function `h` (h ≥ 0, ∫hγ = 1).
pub fn lemma_checks<const D: usize>(h: &TensorGrid<D>, cfg: &LemmaConfig) -> Result<LemmaReport> {
    if D != 2 && D != 3 {
        return Err(Error::InvalidInput(format!("lemma checks need 2 or 3 coordinates, got {D}")));
    }
    let beta = cfg.beta;
    let entropy = |x: &TensorGrid<D>| gamma_weighted_entropy(x, beta);
    let s = entropy(h)?;
    let n = D as f64;
    let plan = QPlan::new(h.axis(), &cfg.quadrature)?;
    let pairs: Vec<(usize, usize)> = (0..D).flat_map(|i| (i + 1..D).map(move |j| (i, j))).collect();
    let averaged: Vec<TensorGrid<D>> =
        pairs.iter().map(|&(i, j)| rotation_average(&plan, h, i, j, beta)).collect::<Result<_>>()?;
    let mut full_q = TensorGrid::zeros(h.axis());
    for a in &averaged {
        full_q = full_q.add_scaled(1.0 / pairs.len() as f64, a);
    }

    let mut entries = Vec::new();
    let mut push = |kind, time, thermostats, lhs: f64, rhs: f64| {
        entries.push(LemmaEntry { kind, time, thermostats, lhs, rhs, pass: lhs <= rhs + cfg.tol });
    };

    let mut lhs = 0.0;
    for (&(i, _), a) in pairs.iter().zip(&averaged) {
        if i == 0 {
            lhs += entropy(&apply_p(a, 0, beta))?;
        }
    }
    push(LemmaKind::PairContraction, None, 1, lhs, (n - 1.5) * s);

    let han: f64 = (0..D).map(|k| entropy(&apply_p(h, k, beta))).sum::<Result<f64>>()?;
    push(LemmaKind::Han, None, 0, han, (n - 1.0) * s);

    for &t in &cfg.times {
        let decay = (-cfg.thermostat_rate * t).exp();
        for m in 1..D {
            let mut evolved = full_q.clone();
            for k in 0..m {
                evolved = thermostat_semigroup(&evolved, k, decay, beta);
            }
            let lhs = entropy(&evolved)?;
            let rhs = (1.0 - m as f64 * (1.0 - decay) / (n * (n - 1.0))) * s;
            let kind = if m == 1 { LemmaKind::OneThermostat } else { LemmaKind::ManyThermostats };
            push(kind, Some(t), m, lhs, rhs);
        }
    }
    let pass = entries.iter().all(|e| e.pass);
    Ok(LemmaReport { n_particles: D, entropy: s, entries, pass })
}

/// A random smooth positive ratio function: a normalized mixture of 1 to 4
/// anisotropic Gaussian bumps with centres in [−1.5, 1.5] and widths in [0.5, 2].
pub fn random_mixture_h<const D: usize, R: Rng + ?Sized>(axis: Axis, beta: f64, rng: &mut R) -> Result<TensorGrid<D>> {
    let count = rng.random_range(1..=4);
    let bumps: Vec<(f64, [f64; D], [f64; D])> = (0..count)
        .map(|_| {
            let w = rng.random_range(0.2..1.0);
            let c = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
            let s = std::array::from_fn(|_| rng.random_range(0.5..2.0));
            (w, c, s)
        })
        .collect();
    let h = TensorGrid::<D>::from_fn(axis, |v| {
        bumps
            .iter()
            .map(|(w, c, s)| w * (0..D).map(|d| (-(v[d] - c[d]).powi(2) / (2.0 * s[d] * s[d])).exp()).product::<f64>())
            .sum()
    });
    normalize_h(&h, beta)
}

/// Runs [`lemma_checks`] on `trials` random mixtures. Trial `k` draws from
/// `trajectory_rng(seed, k)`, so reports come back in trial order and do not
/// depend on the thread count.
pub fn random_lemma_battery<const D: usize>(axis: Axis, trials: usize, seed: u64, cfg: &LemmaConfig) -> Result<Vec<LemmaReport>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k);
            lemma_checks(&random_mixture_h::<D, _>(axis, cfg.beta, &mut rng)?, cfg)
        })
        .collect()
}

/// Normalized indicator of the centred cube [−a, a]^D in the ratio representation.
pub fn indicator_h<const D: usize>(axis: Axis, half_side: f64, beta: f64) -> Result<TensorGrid<D>> {
    let h = TensorGrid::<D>::from_fn(axis, |v| if v.iter().all(|x| x.abs() <= half_side) { 1.0 } else { 0.0 });
    normalize_h(&h, beta)
}

/// ∫ h γ under the discrete equilibrium weights.
pub fn gamma_mass<const D: usize>(h: &TensorGrid<D>, beta: f64) -> f64 {
    h.values().iter().zip(entropy_weights::<D>(h.axis(), beta)).map(|(a, w)| a * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Interpolation;

    #[test]
    fn equilibrium_gives_zero_everywhere() {
        let axis = Axis::new(6.0, 33).unwrap();
        let h = TensorGrid::<2>::from_fn(axis, |_| 1.0);
        let r = lemma_checks(&h, &LemmaConfig::default()).unwrap();
        assert!(r.pass);
        assert!(r.entries.iter().all(|e| e.lhs.abs() < 1e-6 && e.rhs.abs() < 1e-12));
    }

    #[test]
    fn indicator_square_passes() {
        let cfg = LemmaConfig { quadrature: QuadratureConfig::default().with_interp(Interpolation::Bilinear), ..Default::default() };
        let h = indicator_h::<2>(Axis::new(8.0, 129).unwrap(), 1.0, 1.0).unwrap();
        let r = lemma_checks(&h, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn random_mixtures_pass_in_two_and_three_dimensions() {
        let cfg = LemmaConfig::default();
        let mut rng = trajectory_rng(11, 0);
        for _ in 0..3 {
            let h = random_mixture_h::<2, _>(Axis::new(8.0, 257).unwrap(), 1.0, &mut rng).unwrap();
            assert!((gamma_mass(&h, 1.0) - 1.0).abs() < 1e-12);
            let r = lemma_checks(&h, &cfg).unwrap();
            assert!(r.pass, "{r:?}");
        }
        let h = random_mixture_h::<3, _>(Axis::new(6.0, 41).unwrap(), 1.0, &mut rng).unwrap();
        let r = lemma_checks(&h, &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.entries.len(), 2 + 3 * 2);
    }

    #[test]
    fn battery_is_ordered_by_trial() {
        let axis = Axis::new(6.0, 33).unwrap();
        let cfg = LemmaConfig::default();
        let all = random_lemma_battery::<2>(axis, 3, 5, &cfg).unwrap();
        let second = lemma_checks(&random_mixture_h::<2, _>(axis, 1.0, &mut trajectory_rng(5, 1)).unwrap(), &cfg).unwrap();
        assert_eq!(all[1], second);
    }

    #[test]
    fn rejects_unnormalized() {
        let h = TensorGrid::<2>::from_fn(Axis::new(6.0, 33).unwrap(), |_| 2.0);
        assert!(matches!(lemma_checks(&h, &LemmaConfig::default()), Err(Error::NotNormalized { .. })));
    }
}
