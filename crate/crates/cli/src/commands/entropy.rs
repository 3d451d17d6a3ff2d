use anyhow::Result;
use kaclab::entropy::{
    laplace_consistency, production_counterexample_ratio, random_lemma_battery, verify_entropy_decay, weak_optimizer_ratio,
    DecayBound, LemmaConfig, LemmaReport, LEMMA_TOL,
};
use kaclab::grid::{Axis, Grid2D, Interpolation, QuadratureConfig};
use kaclab::model::maxwellian_density;
use kaclab::ModelParams;
use serde::Serialize;

use super::simulate::params_from;
use super::{options, Experiment, RunContext};
use crate::config::{ConfigError, ConfigResult, Settings};
use crate::output::{OutputDir, Table};
use crate::row;

fn config_err(e: impl ToString) -> ConfigError {
    ConfigError(e.to_string())
}

fn axis_from(s: &Settings, points: usize, half_width: f64) -> ConfigResult<Axis> {
    Axis::new(s.or("half_width", half_width)?, s.or("points", points)?).map_err(config_err)
}

options!(
    /// Entropy decay envelope, checked against grid evolution when N = 2, m = 1.
    EntropyBoundArgs {
        n: usize,
        m: usize,
        lambda: f64,
        mu: f64,
        /// Comma-separated check times.
        times: String,
        /// box:a (uniform on [-a,a]^2) or hot:T (product Maxwellian at temperature T).
        initial: String,
        points: usize,
        half_width: f64,
        dt: f64,
        tol: f64,
    }
);

/// Initial two-particle density for the grid evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntropyInitial {
    Box { half_side: f64 },
    Hot { temperature: f64 },
}

impl EntropyInitial {
    pub fn parse(raw: &str) -> ConfigResult<Self> {
        let bad = || ConfigError(format!("bad value `{raw}` for `initial`: expected box:a or hot:T"));
        let (kind, value) = raw.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        if !(value > 0.0) {
            return Err(bad());
        }
        match kind {
            "box" => Ok(Self::Box { half_side: value }),
            "hot" => Ok(Self::Hot { temperature: value }),
            _ => Err(bad()),
        }
    }

    pub fn density(&self, axis: Axis) -> kaclab::Result<Grid2D> {
        match *self {
            Self::Box { half_side } => {
                Grid2D::from_fn(axis, |v| if v[0].abs() <= half_side && v[1].abs() <= half_side { 1.0 } else { 0.0 }).normalized()
            }
            Self::Hot { temperature } => {
                let b = 1.0 / temperature;
                Grid2D::from_fn(axis, |v| maxwellian_density(b, v[0]) * maxwellian_density(b, v[1])).normalized()
            }
        }
    }

    /// Discontinuous data is sampled with the positivity-preserving interpolant.
    pub fn quadrature(&self) -> QuadratureConfig {
        match self {
            Self::Box { .. } => QuadratureConfig::default().with_interp(Interpolation::Bilinear),
            Self::Hot { .. } => QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyBoundConfig {
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub initial: EntropyInitial,
    pub axis: Axis,
    pub dt: f64,
    pub tol: f64,
}

impl Experiment for EntropyBoundConfig {
    const NAME: &'static str = "entropy-bound";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let params = params_from(s, s.or("n", 2)?, s.or("m", 1)?)?;
        DecayBound::new(&params).map_err(config_err)?;
        let times: Vec<f64> = s.list_or("times", &[0.5, 1.0, 2.0, 4.0])?;
        if times.windows(2).any(|w| w[1] <= w[0]) || times.first().is_some_and(|&t| t < 0.0) {
            return Err(ConfigError("`times` must be non-negative and increasing".into()));
        }
        let limit = 0.1 / (2.0 * params.kac_rate + params.thermostat_rate);
        Ok(Self {
            params,
            times,
            initial: EntropyInitial::parse(&s.string_or("initial", "box:2"))?,
            axis: axis_from(s, 257, 8.0)?,
            dt: s.or("dt", limit / 3.0)?,
            tol: s.or("tol", 1e-4)?,
        })
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let bound = DecayBound::new(&self.params)?;
        let laplace = laplace_consistency(&bound);
        let horizon = self.times.last().copied().unwrap_or(1.0).max(1.0);
        let mut curve = Table::new(&["time", "D", "D_prime"]);
        for k in 0..=200 {
            let t = horizon * k as f64 / 200.0;
            curve.push(row![t, bound.eval(t), bound.derivative(t)]);
        }
        out.write_csv("decay_bound.csv", &curve)?;

        let mut pass = laplace.pass;
        let grid = if self.params.n_particles == 2 && self.params.n_thermostated == 1 {
            let f0 = self.initial.density(self.axis)?;
            let v = verify_entropy_decay(&f0, &self.params, &self.times, self.dt, &self.initial.quadrature(), self.tol)?;
            let mut t = Table::new(&["time", "entropy", "bound", "pass"]);
            t.push(row![0.0, v.initial_entropy, v.initial_entropy, true]);
            for r in &v.rows {
                t.push(row![r.time, r.entropy, r.bound, r.pass]);
            }
            out.write_csv("entropy.csv", &t)?;
            pass &= v.pass;
            Some(serde_json::json!({ "monotone": v.monotone, "max_mass_drift": v.max_mass_drift, "pass": v.pass }))
        } else {
            None
        };
        let summary = serde_json::json!({
            "delta_minus": bound.delta_minus,
            "delta_plus": bound.delta_plus,
            "laplace_root_error": laplace.root_error,
            "laplace_max_relative_error": laplace.max_relative_error,
            "grid_check": grid,
            "pass": pass,
        });
        out.write_json("summary.json", &summary)?;
        println!("{}", serde_json::to_string_pretty(&summary)?);
        Ok(pass)
    }
}

options!(
    /// Entropy inequalities on random ratio functions.
    LemmasArgs {
        /// Number of particles on the grid: 2 or 3.
        dims: usize,
        trials: usize,
        points: usize,
        half_width: f64,
        mu: f64,
        tol: f64,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct LemmasConfig {
    pub dims: usize,
    pub trials: usize,
    pub axis: Axis,
    pub lemma: LemmaConfig,
}

impl LemmasConfig {
    pub fn reports(&self, seed: u64) -> Result<Vec<LemmaReport>> {
        Ok(match self.dims {
            2 => random_lemma_battery::<2>(self.axis, self.trials, seed, &self.lemma)?,
            _ => random_lemma_battery::<3>(self.axis, self.trials, seed, &self.lemma)?,
        })
    }
}

pub fn lemma_table(reports: &[LemmaReport]) -> Table {
    let mut t = Table::new(&["trial", "n_particles", "kind", "time", "thermostats", "lhs", "rhs", "pass"]);
    for (k, r) in reports.iter().enumerate() {
        for e in &r.entries {
            let kind = serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            t.push(row![k, r.n_particles, kind, e.time.unwrap_or(f64::NAN), e.thermostats, e.lhs, e.rhs, e.pass]);
        }
    }
    t
}

impl Experiment for LemmasConfig {
    const NAME: &'static str = "lemmas";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let dims = s.or("dims", 2)?;
        let (points, width) = match dims {
            2 => (257, 8.0),
            3 => (49, 6.0),
            _ => return Err(ConfigError(format!("`dims` must be 2 or 3, got {dims}"))),
        };
        let lemma = LemmaConfig { thermostat_rate: s.or("mu", 1.0)?, tol: s.or("tol", LEMMA_TOL)?, ..Default::default() };
        Ok(Self { dims, trials: s.or("trials", 100)?, axis: axis_from(s, points, width)?, lemma })
    }

    fn run(&self, ctx: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let reports = self.reports(ctx.seed)?;
        out.write_csv("lemmas.csv", &lemma_table(&reports))?;
        let failures = reports.iter().flat_map(|r| &r.entries).filter(|e| !e.pass).count();
        let summary = serde_json::json!({ "trials": reports.len(), "failures": failures, "pass": failures == 0 });
        out.write_json("summary.json", &summary)?;
        println!("{} trials, {failures} failing inequalities", reports.len());
        Ok(failures == 0)
    }
}

options!(
    /// Entropy-production ratio of the box counterexample.
    CounterexampleArgs {
        /// Half side of the box.
        a: f64,
        /// Comma-separated offsets R.
        offsets: String,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleConfig {
    pub a: f64,
    pub offsets: Vec<f64>,
}

impl CounterexampleConfig {
    /// Ratios per offset, and whether they strictly increase.
    pub fn ratios(&self) -> Result<(Table, Vec<f64>, bool)> {
        let mut t = Table::new(&["a", "R", "entropy", "entropy_thermostat", "entropy_kac", "ratio"]);
        let mut ratios = Vec::new();
        for &r in &self.offsets {
            let p = production_counterexample_ratio(self.a, r)?;
            t.push(row![self.a, r, p.entropy, p.entropy_thermostat, p.entropy_kac, p.ratio]);
            ratios.push(p.ratio);
        }
        let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
        Ok((t, ratios, increasing))
    }
}

impl Experiment for CounterexampleConfig {
    const NAME: &'static str = "counterexample";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let cfg = Self { a: s.or("a", 1.0)?, offsets: s.list_or("offsets", &[5.0, 10.0, 20.0])? };
        for &r in &cfg.offsets {
            production_counterexample_ratio(cfg.a, r).map_err(config_err)?;
        }
        Ok(cfg)
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let (table, ratios, increasing) = self.ratios()?;
        out.write_csv("counterexample.csv", &table)?;
        out.write_json("summary.json", &serde_json::json!({ "ratios": ratios, "strictly_increasing": increasing }))?;
        println!("ratios {ratios:?}, strictly increasing: {increasing}");
        Ok(increasing)
    }
}

options!(
    /// Entropy-production ratio of the two-temperature mixture under the weak thermostat.
    WeakOptimizerArgs {
        /// Comma-separated mixture weights of the hot component.
        deltas: String,
        beta: f64,
        eta: f64,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct WeakOptimizerConfig {
    pub deltas: Vec<f64>,
    pub beta: f64,
    pub eta: f64,
}

impl WeakOptimizerConfig {
    /// Table plus |ratio + η/2| per weight.
    pub fn distances(&self) -> Result<(Table, Vec<f64>)> {
        let mut t = Table::new(&["delta", "entropy", "production", "ratio", "distance_to_limit"]);
        let mut dist = Vec::new();
        for &d in &self.deltas {
            let w = weak_optimizer_ratio(d, self.beta, self.eta)?;
            let gap = (w.ratio + 0.5 * self.eta).abs();
            t.push(row![d, w.entropy, w.production, w.ratio, gap]);
            dist.push(gap);
        }
        Ok((t, dist))
    }
}

impl Experiment for WeakOptimizerConfig {
    const NAME: &'static str = "weak-optimizer";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let cfg = Self { deltas: s.list_or("deltas", &[1e-2, 1e-3, 1e-4])?, beta: s.or("beta", 1.0)?, eta: s.or("eta", 1.0)? };
        if cfg.deltas.iter().any(|&d| !(d > 1e-6 && d < 0.4)) {
            return Err(ConfigError("every delta must lie in (1e-6, 0.4)".into()));
        }
        if !(cfg.beta > 0.0 && cfg.eta >= 0.0) {
            return Err(ConfigError("need beta > 0 and eta >= 0".into()));
        }
        Ok(cfg)
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let (table, dist) = self.distances()?;
        out.write_csv("weak_optimizer.csv", &table)?;
        let decreasing = dist.windows(2).all(|w| w[1] < w[0]);
        out.write_json("summary.json", &serde_json::json!({ "distance_to_limit": dist, "decreasing": decreasing }))?;
        println!("|ratio + eta/2| = {dist:?}, decreasing: {decreasing}");
        Ok(decreasing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_density_forms() {
        assert_eq!(EntropyInitial::parse("box:2").unwrap(), EntropyInitial::Box { half_side: 2.0 });
        assert_eq!(EntropyInitial::parse("hot:1.5").unwrap(), EntropyInitial::Hot { temperature: 1.5 });
        for bad in ["box", "hot:-1", "cube:1"] {
            assert!(EntropyInitial::parse(bad).is_err(), "{bad}");
        }
    }
}
