use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::step::{draw_waiting_time, fire_event};
use crate::error::{Error, Result};
use crate::model::{sample_maxwellian, standard_gaussian, ModelParams};

/// Trajectories handled by one work unit. Fixed so the reduction order does
/// not depend on the thread count.
const BLOCK: usize = 256;

/// 1.96, the two-sided 95% normal quantile.
const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    PointMass { velocities: Vec<f64> },
    /// Independent centred Gaussians with the given per-particle temperatures.
    ProductGaussian { temperatures: Vec<f64> },
    /// Uniform on the sphere Σv² = N·energy.
    UniformSphere { energy: f64 },
}

impl InitialCondition {
    /// Equilibrium at the bath temperature.
    pub fn equilibrium(params: &ModelParams) -> Self {
        Self::ProductGaussian { temperatures: vec![1.0 / params.inverse_temperature; params.n_particles] }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        match self {
            Self::PointMass { velocities } if velocities.len() != n => {
                bad(format!("point mass has {} entries, expected {n}", velocities.len()))
            }
            Self::PointMass { velocities } if velocities.iter().any(|v| !v.is_finite()) => {
                bad("point mass has non-finite entries".into())
            }
            Self::ProductGaussian { temperatures } if temperatures.len() != n => {
                bad(format!("{} temperatures given, expected {n}", temperatures.len()))
            }
            Self::ProductGaussian { temperatures } if temperatures.iter().any(|t| !(t.is_finite() && *t >= 0.0)) => {
                bad("temperatures must be finite and non-negative".into())
            }
            Self::UniformSphere { energy } if !(energy.is_finite() && *energy >= 0.0) => {
                bad("sphere energy must be finite and non-negative".into())
            }
            _ => Ok(()),
        }
    }

    fn sample<R: Rng + ?Sized>(&self, out: &mut [f64], rng: &mut R) {
        match self {
            Self::PointMass { velocities } => out.copy_from_slice(velocities),
            Self::ProductGaussian { temperatures } => {
                for (v, t) in out.iter_mut().zip(temperatures) {
                    *v = if *t > 0.0 { sample_maxwellian(1.0 / t, rng) } else { 0.0 };
                }
            }
            Self::UniformSphere { energy } => {
                let radius = (out.len() as f64 * energy).sqrt();
                loop {
                    out.iter_mut().for_each(|v| *v = standard_gaussian(rng));
                    let norm = out.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        out.iter_mut().for_each(|v| *v *= radius / norm);
                        break;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub horizon: f64,
    pub sample_times: Vec<f64>,
    pub ensemble_size: usize,
    pub seed: u64,
    pub initial_condition: InitialCondition,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.params.validate_pairs()?;
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidInput(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.sample_times.is_empty() {
            return Err(Error::InvalidInput("sample_times is empty".into()));
        }
        if self.sample_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("sample_times must be sorted".into()));
        }
        if self.sample_times.iter().any(|t| !(0.0..=self.horizon).contains(t)) {
            return Err(Error::InvalidInput("sample_times must lie in [0, horizon]".into()));
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidInput("ensemble_size must be at least 1".into()));
        }
        self.initial_condition.validate(self.params.n_particles)
    }
}

/// Per-trajectory stream: the seed picks the key, the index picks the stream.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    pub kinetic_energy_mean: Vec<f64>,
    pub kinetic_energy_ci: Vec<f64>,
    pub second_moment_thermostated: Vec<f64>,
    pub second_moment_thermostated_ci: Vec<f64>,
    pub second_moment_free: Vec<f64>,
    pub second_moment_free_ci: Vec<f64>,
    /// Sample standard deviations, kept for σ-based checks.
    pub kinetic_energy_sd: Vec<f64>,
    pub second_moment_thermostated_sd: Vec<f64>,
    pub second_moment_free_sd: Vec<f64>,
    pub ensemble_size: usize,
}

/// Running mean and centred sum of squares.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.count == 0.0 {
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count / total;
        self.m2 += other.m2 + d * d * self.count * other.count / total;
        self.count = total;
    }

    fn sd(&self) -> f64 {
        if self.count > 1.0 {
            (self.m2 / (self.count - 1.0)).sqrt()
        } else {
            0.0
        }
    }
}

/// Accumulators for the three observables at each sample time.
type Stats = Vec<[Welford; 3]>;

fn run_block(config: &SimConfig, start: usize, end: usize) -> Stats {
    let params = &config.params;
    let n = params.n_particles;
    let mut stats: Stats = vec![[Welford::default(); 3]; config.sample_times.len()];
    let mut state = vec![0.0; n];
    for index in start..end {
        let mut rng = trajectory_rng(config.seed, index as u64);
        config.initial_condition.sample(&mut state, &mut rng);
        let mut t_next = draw_waiting_time(params, &mut rng).unwrap_or(f64::INFINITY);
        for (slot, &ts) in stats.iter_mut().zip(&config.sample_times) {
            while t_next <= ts {
                fire_event(&mut state, params, &mut rng);
                t_next += draw_waiting_time(params, &mut rng).unwrap_or(f64::INFINITY);
            }
            let k = 0.5 * state.iter().map(|v| v * v).sum::<f64>();
            slot[0].push(k);
            slot[1].push(state[0] * state[0]);
            slot[2].push(state[n - 1] * state[n - 1]);
        }
    }
    stats
}

/// Monte Carlo estimates of the tracked moments at every sample time.
///
/// Output is bit-identical for a fixed config regardless of the rayon pool size.
pub fn run_ensemble(config: &SimConfig) -> Result<ObservableSeries> {
    config.validate()?;
    let blocks: Vec<(usize, usize)> = (0..config.ensemble_size)
        .step_by(BLOCK)
        .map(|s| (s, (s + BLOCK).min(config.ensemble_size)))
        .collect();
    let partial: Vec<Stats> = blocks.par_iter().map(|&(s, e)| run_block(config, s, e)).collect();
    let mut total: Stats = vec![[Welford::default(); 3]; config.sample_times.len()];
    for block in &partial {
        for (acc, b) in total.iter_mut().zip(block) {
            for (a, x) in acc.iter_mut().zip(b) {
                a.merge(x);
            }
        }
    }

    let sqrt_n = (config.ensemble_size as f64).sqrt();
    let column = |k: usize| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mean = total.iter().map(|s| s[k].mean).collect();
        let sd: Vec<f64> = total.iter().map(|s| s[k].sd()).collect();
        let ci = sd.iter().map(|s| Z95 * s / sqrt_n).collect();
        (mean, ci, sd)
    };
    let (k_mean, k_ci, k_sd) = column(0);
    let (t_mean, t_ci, t_sd) = column(1);
    let (f_mean, f_ci, f_sd) = column(2);
    Ok(ObservableSeries {
        times: config.sample_times.clone(),
        kinetic_energy_mean: k_mean,
        kinetic_energy_ci: k_ci,
        second_moment_thermostated: t_mean,
        second_moment_thermostated_ci: t_ci,
        second_moment_free: f_mean,
        second_moment_free_ci: f_ci,
        kinetic_energy_sd: k_sd,
        second_moment_thermostated_sd: t_sd,
        second_moment_free_sd: f_sd,
        ensemble_size: config.ensemble_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(params: ModelParams, ic: InitialCondition, size: usize) -> SimConfig {
        SimConfig {
            params,
            horizon: 4.0,
            sample_times: (0..=8).map(|k| 0.5 * k as f64).collect(),
            ensemble_size: size,
            seed: 11,
            initial_condition: ic,
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
        let mut c = config(p, InitialCondition::equilibrium(&p), 10);
        c.sample_times.clear();
        assert!(run_ensemble(&c).is_err());
        let mut c = config(p, InitialCondition::equilibrium(&p), 10);
        c.sample_times = vec![1.0, 0.5];
        assert!(run_ensemble(&c).is_err());
        let c = config(p, InitialCondition::PointMass { velocities: vec![1.0] }, 10);
        assert!(run_ensemble(&c).is_err());
    }

    #[test]
    fn deterministic_across_pool_sizes() {
        let p = ModelParams::unit(4, 2, 1.0, 0.7).unwrap();
        let c = config(p, InitialCondition::UniformSphere { energy: 2.0 }, 1000);
        let a = run_ensemble(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_ensemble(&c).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn kinetic_energy_exactly_constant_without_bath() {
        let p = ModelParams::unit(3, 0, 1.0, 1.0).unwrap();
        let c = config(p, InitialCondition::PointMass { velocities: vec![1.0, 2.0, -1.0] }, 300);
        let s = run_ensemble(&c).unwrap();
        for k in &s.kinetic_energy_mean {
            assert!((k - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_initial_condition_has_fixed_energy() {
        let p = ModelParams::unit(5, 2, 1.0, 1.0).unwrap();
        let mut c = config(p, InitialCondition::UniformSphere { energy: 1.5 }, 50);
        c.sample_times = vec![0.0];
        let s = run_ensemble(&c).unwrap();
        assert!((s.kinetic_energy_mean[0] - 0.5 * 5.0 * 1.5).abs() < 1e-12);
        assert!(s.kinetic_energy_sd[0] < 1e-12);
    }

    #[test]
    fn welford_merge_matches_single_pass() {
        let xs: Vec<f64> = (0..100).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut whole = Welford::default();
        xs.iter().for_each(|&x| whole.push(x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..37].iter().for_each(|&x| a.push(x));
        xs[37..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.mean - whole.mean).abs() < 1e-14);
        assert!((a.sd() - whole.sd()).abs() < 1e-14);
    }
}
