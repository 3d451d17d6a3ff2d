use anyhow::Result;
use kaclab::sim::{fit_exponential_rate, run_ensemble, FitOptions, InitialCondition, ObservableSeries, SimConfig};
use kaclab::spectral::{degree_two_matrix, gap_2_1};
use kaclab::ModelParams;
use serde::Serialize;

use super::{options, Experiment, RunContext};
use crate::config::{ConfigError, ConfigResult, Settings};
use crate::output::{OutputDir, Table};
use crate::row;

options!(
    /// Monte Carlo ensemble of the jump process.
    SimulateArgs {
        /// Number of particles (required).
        n: usize,
        /// Number of thermostated particles (required).
        m: usize,
        lambda: f64,
        mu: f64,
        beta: f64,
        horizon: f64,
        /// Spacing of the sample times.
        sample_step: f64,
        ensemble: usize,
        /// equilibrium | point:v1,v2,... | product:T1,T2,... | sphere:E
        initial: String,
        /// Rate fit ignores samples before this time.
        fit_min_time: f64,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct SimulateConfig {
    pub params: ModelParams,
    pub horizon: f64,
    pub sample_step: f64,
    pub ensemble: usize,
    pub initial: InitialCondition,
    pub fit_min_time: f64,
}

pub fn parse_initial(raw: &str, params: &ModelParams) -> ConfigResult<InitialCondition> {
    let bad = |why: String| ConfigError(format!("bad value `{raw}` for `initial`: {why}"));
    let numbers = |body: &str| -> ConfigResult<Vec<f64>> {
        body.split(',').map(|x| x.trim().parse::<f64>().map_err(|e| bad(e.to_string()))).collect()
    };
    match raw.split_once(':') {
        None if raw == "equilibrium" => Ok(InitialCondition::equilibrium(params)),
        Some(("point", body)) => Ok(InitialCondition::PointMass { velocities: numbers(body)? }),
        Some(("product", body)) => Ok(InitialCondition::ProductGaussian { temperatures: numbers(body)? }),
        Some(("sphere", body)) => Ok(InitialCondition::UniformSphere { energy: body.trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))? }),
        _ => Err(bad("expected equilibrium, point:..., product:... or sphere:E".into())),
    }
}

pub fn params_from(settings: &Settings, n: usize, m: usize) -> ConfigResult<ModelParams> {
    ModelParams::new(n, m, settings.or("lambda", 1.0)?, settings.or("mu", 1.0)?, settings.or("beta", 1.0)?)
        .map_err(|e| ConfigError(e.to_string()))
}

impl Experiment for SimulateConfig {
    const NAME: &'static str = "simulate";

    fn from_settings(s: &Settings, ctx: &RunContext) -> ConfigResult<Self> {
        let params = params_from(s, s.require("n")?, s.require("m")?)?;
        let initial = parse_initial(&s.string_or("initial", "equilibrium"), &params)?;
        let cfg = Self {
            params,
            horizon: s.or("horizon", 10.0)?,
            sample_step: s.or("sample_step", 0.25)?,
            ensemble: s.or("ensemble", if ctx.quick { 2_000 } else { 20_000 })?,
            initial,
            fit_min_time: s.or("fit_min_time", 1.0)?,
        };
        if !(cfg.sample_step > 0.0) {
            return Err(ConfigError("`sample_step` must be positive".into()));
        }
        cfg.sim_config(ctx.seed).validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(cfg)
    }

    fn run(&self, ctx: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let series = run_ensemble(&self.sim_config(ctx.seed))?;
        out.write_csv("simulate.csv", &series_table(&series))?;
        let opts = FitOptions { min_time: self.fit_min_time, ..Default::default() };
        let asymptote = self.params.equilibrium_kinetic_energy();
        let fit = fit_exponential_rate(&series.times, &series.kinetic_energy_mean, Some(&series.kinetic_energy_ci), asymptote, &opts);
        let p = &self.params;
        let predicted = if p.n_particles == 2 && p.n_thermostated == 1 {
            Some(gap_2_1(p.kac_rate, p.thermostat_rate))
        } else {
            degree_two_matrix(p).ok().map(|d| d.smallest_closed_form)
        };
        let summary = serde_json::json!({
            "ensemble_size": series.ensemble_size,
            "kinetic_energy_asymptote": asymptote,
            "fitted_rate": fit.as_ref().ok(),
            "fit_error": fit.as_ref().err().map(|e| e.to_string()),
            "degree_two_rate": predicted,
        });
        out.write_json("summary.json", &summary)?;
        println!("{}", serde_json::to_string_pretty(&summary)?);
        Ok(true)
    }
}

impl SimulateConfig {
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        let count = (self.horizon / self.sample_step + 1e-9).floor() as usize;
        SimConfig {
            params: self.params,
            horizon: self.horizon,
            sample_times: (0..=count).map(|k| k as f64 * self.sample_step).collect(),
            ensemble_size: self.ensemble,
            seed,
            initial_condition: self.initial.clone(),
        }
    }
}

pub fn series_table(s: &ObservableSeries) -> Table {
    let mut t = Table::new(&["time", "K_mean", "K_ci", "m2_thermo", "m2_thermo_ci", "m2_free", "m2_free_ci"]);
    for k in 0..s.times.len() {
        t.push(row![
            s.times[k],
            s.kinetic_energy_mean[k],
            s.kinetic_energy_ci[k],
            s.second_moment_thermostated[k],
            s.second_moment_thermostated_ci[k],
            s.second_moment_free[k],
            s.second_moment_free_ci[k],
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_condition_forms() {
        let p = ModelParams::unit(2, 1, 1.0, 1.0).unwrap();
        assert_eq!(parse_initial("point:2,0", &p).unwrap(), InitialCondition::PointMass { velocities: vec![2.0, 0.0] });
        assert_eq!(parse_initial("sphere:1.5", &p).unwrap(), InitialCondition::UniformSphere { energy: 1.5 });
        assert_eq!(parse_initial("equilibrium", &p).unwrap(), InitialCondition::equilibrium(&p));
        assert!(parse_initial("point:a", &p).is_err());
        assert!(parse_initial("box", &p).is_err());
    }
}
