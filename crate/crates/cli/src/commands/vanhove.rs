use anyhow::Result;
use kaclab::grid::{write_grid, Axis, Grid2D, QuadratureConfig};
use kaclab::model::maxwellian_density as gauss;
use kaclab::vanhove::{
    convergence_study, dyson_tail_bound, dyson_truncated, evolve_rescaled, operator_identity_check, relaxation_bound_check,
    three_particle_identity_check, weak_limit_reference, ConvergenceReport, IdentityReport, RescaledOptions,
    VanHoveStudyConfig, DYSON_MAX_ORDER,
};
use serde::Serialize;

use super::{options, Experiment, RunContext};
use crate::config::{ConfigError, ConfigResult, Settings};
use crate::output::{OutputDir, Table};
use crate::row;

/// Agreement required between the truncated series and direct evolution.
pub const DYSON_TOL: f64 = 1e-4;

options!(
    /// Weak-coupling limit: operator identities, convergence in λ and the series cross-check.
    VanHoveArgs {
        tau: f64,
        /// Comma-separated, strictly decreasing.
        lambdas: String,
        mu: f64,
        /// shifted | thermalized | equilibrium
        initial: String,
        points: usize,
        half_width: f64,
        /// Step in rescaled time.
        dt: f64,
        threshold: f64,
        noise_floor: f64,
        dyson_order: usize,
        dyson_tau: f64,
        /// Write the limit density and the smallest-λ solution as .bin grids.
        save_grids: bool,
    }
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VanHoveInitial {
    /// Independent Gaussians with shifted centres and unequal widths.
    Shifted,
    /// Already at the bath in the first velocity, cold in the second.
    Thermalized,
    Equilibrium,
}

impl VanHoveInitial {
    fn parse(raw: &str) -> ConfigResult<Self> {
        match raw {
            "shifted" => Ok(Self::Shifted),
            "thermalized" => Ok(Self::Thermalized),
            "equilibrium" => Ok(Self::Equilibrium),
            _ => Err(ConfigError(format!("bad value `{raw}` for `initial`: expected shifted, thermalized or equilibrium"))),
        }
    }

    pub fn density(self, axis: Axis) -> kaclab::Result<Grid2D> {
        match self {
            Self::Shifted => Grid2D::from_fn(axis, |v| gauss(1.0, v[0] - 0.8) * gauss(0.6, v[1] + 0.5)).normalized(),
            Self::Thermalized => Grid2D::from_fn(axis, |v| gauss(1.0, v[0]) * gauss(0.4, v[1])).normalized(),
            Self::Equilibrium => Ok(Grid2D::maxwellian(axis, 1.0)),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VanHoveConfig {
    pub tau: f64,
    pub lambdas: Vec<f64>,
    pub mu: f64,
    pub initial: VanHoveInitial,
    pub axis: Axis,
    pub options: RescaledOptions,
    pub threshold: f64,
    pub noise_floor: f64,
    pub dyson_order: usize,
    pub dyson_tau: f64,
    pub save_grids: bool,
}

/// Outcome of one vanhove run, also consumed by the acceptance suite.
#[derive(Debug, Clone, Serialize)]
pub struct VanHoveOutcome {
    pub identity: IdentityReport,
    pub three_particle: IdentityReport,
    pub study: ConvergenceReport,
    pub dyson_error: f64,
    pub dyson_tail: f64,
    pub dyson_pass: bool,
    pub relaxation_pass: bool,
    pub pass: bool,
}

impl VanHoveConfig {
    fn study(&self, initial: Grid2D) -> VanHoveStudyConfig {
        VanHoveStudyConfig {
            initial,
            tau: self.tau,
            lambdas: self.lambdas.clone(),
            mu: self.mu,
            options: self.options,
            dyson_order: self.dyson_order,
            threshold: self.threshold,
            noise_floor: self.noise_floor,
        }
    }

    /// Runs every check and writes the tables.
    pub fn execute(&self, out: &mut OutputDir) -> Result<VanHoveOutcome> {
        let q = self.options.quadrature;
        let identity = operator_identity_check(&q)?;
        let three_particle = three_particle_identity_check(&q)?;
        let mut t = Table::new(&["case", "partner", "average_vs_weak", "weak_commutator", "average_vs_commuted", "tol", "pass"]);
        for c in identity.cases.iter().chain(&three_particle.cases) {
            t.push(row![c.name.as_str(), c.partner, c.average_vs_weak, c.weak_commutator, c.average_vs_commuted, c.tol, c.pass]);
        }
        out.write_csv("identity.csv", &t)?;

        let initial = self.initial.density(self.axis)?;
        let study = convergence_study(&self.study(initial.clone()))?;
        let mut t = Table::new(&["lambda", "L1_distance"]);
        for p in &study.points {
            t.push(row![p.lambda, p.l1_distance]);
        }
        out.write_csv("vanhove.csv", &t)?;

        // Series cross-check at λ = μ, where κτ stays small.
        let direct = evolve_rescaled(&initial, self.mu, self.mu, self.dyson_tau, &self.options)?;
        let mut t = Table::new(&["order", "L1_error", "tail_bound"]);
        let mut orders: Vec<usize> = [1, 2, 4, 8, self.dyson_order].into_iter().filter(|&k| k <= self.dyson_order).collect();
        orders.dedup();
        let mut dyson_error = f64::NAN;
        for &k in &orders {
            let err = dyson_truncated(&initial, self.mu, self.mu, self.dyson_tau, k, &self.options)?.l1_distance(&direct);
            t.push(row![k, err, dyson_tail_bound(self.dyson_tau, k)]);
            dyson_error = err;
        }
        out.write_csv("dyson.csv", &t)?;
        let dyson_tail = dyson_tail_bound(self.dyson_tau, self.dyson_order);
        let dyson_pass = dyson_error < DYSON_TOL;

        let relaxation = relaxation_bound_check(&initial, &[1.0, 2.0, 5.0], self.options.beta);
        let mut t = Table::new(&["kappa_tau", "distance", "bound", "pass"]);
        for r in &relaxation {
            t.push(row![r.kappa_tau, r.distance, r.bound, r.pass]);
        }
        out.write_csv("relaxation.csv", &t)?;
        let relaxation_pass = relaxation.iter().all(|r| r.pass);

        if self.save_grids {
            let limit = weak_limit_reference(&initial, self.tau, &self.options)?;
            let path = out.path().join("weak_limit.bin");
            write_grid(&limit, &path)?;
            out.register(path);
            if let Some(&lambda) = self.lambdas.last() {
                let f = evolve_rescaled(&initial, lambda, self.mu, self.tau, &self.options)?;
                let path = out.path().join("smallest_lambda.bin");
                write_grid(&f, &path)?;
                out.register(path);
            }
        }
        let pass = identity.pass && three_particle.pass && study.pass && dyson_pass && relaxation_pass;
        Ok(VanHoveOutcome { identity, three_particle, study, dyson_error, dyson_tail, dyson_pass, relaxation_pass, pass })
    }
}

impl Experiment for VanHoveConfig {
    const NAME: &'static str = "vanhove";

    fn from_settings(s: &Settings, ctx: &RunContext) -> ConfigResult<Self> {
        let defaults = RescaledOptions::default();
        let axis = Axis::new(s.or("half_width", 8.0)?, s.or("points", if ctx.quick { 129 } else { 257 })?)
            .map_err(|e| ConfigError(e.to_string()))?;
        let cfg = Self {
            tau: s.or("tau", 1.0)?,
            lambdas: s.list_or("lambdas", &[0.2, 0.1, 0.05])?,
            mu: s.or("mu", 1.0)?,
            initial: VanHoveInitial::parse(&s.string_or("initial", "shifted"))?,
            axis,
            options: RescaledOptions { quadrature: QuadratureConfig::default(), dt: s.or("dt", defaults.dt)?, ..defaults },
            threshold: s.or("threshold", 0.1)?,
            noise_floor: s.or("noise_floor", 0.0)?,
            dyson_order: s.or("dyson_order", 15)?,
            dyson_tau: s.or("dyson_tau", 0.5)?,
            save_grids: s.or("save_grids", false)?,
        };
        cfg.study(Grid2D::zeros(axis)).validate().map_err(|e| ConfigError(e.to_string()))?;
        if !(1..=DYSON_MAX_ORDER).contains(&cfg.dyson_order) {
            return Err(ConfigError(format!("`dyson_order` must lie in 1..={DYSON_MAX_ORDER}")));
        }
        if !(cfg.dt_ok() && cfg.dyson_tau > 0.0 && cfg.dyson_tau <= 10.0) {
            return Err(ConfigError("need dt > 0 and 0 < dyson_tau <= 10".into()));
        }
        Ok(cfg)
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let outcome = self.execute(out)?;
        out.write_json("summary.json", &outcome)?;
        let distances: Vec<f64> = outcome.study.points.iter().map(|p| p.l1_distance).collect();
        println!(
            "identities {}, distances {distances:?}, series error {:.3e} (tail {:.3e})",
            outcome.identity.pass && outcome.three_particle.pass,
            outcome.dyson_error,
            outcome.dyson_tail
        );
        Ok(outcome.pass)
    }
}

impl VanHoveConfig {
    fn dt_ok(&self) -> bool {
        self.options.dt > 0.0 && self.options.dt.is_finite()
    }
}
