use std::fs::File;
use std::io::BufWriter;

use anyhow::{Context, Result};
use kaclab::spectral::{assemble_generator, check_gap_bounds, exact_spectrum_2_1, galerkin_gap, SpectrumLabel};
use kaclab::ModelParams;
use serde::Serialize;

use super::simulate::params_from;
use super::{options, Experiment, RunContext};
use crate::config::{ConfigError, ConfigResult, Settings};
use crate::output::{OutputDir, Table};
use crate::row;

options!(
    /// Hermite–Galerkin spectral gap of the generator.
    GapArgs {
        n: usize,
        m: usize,
        lambda: f64,
        mu: f64,
        /// Total Hermite degree cutoff.
        degree: u32,
        /// Also write the generator in coordinate format (generator.mtx).
        dump_matrix: bool,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct GapConfig {
    pub params: ModelParams,
    pub degree: u32,
    pub dump_matrix: bool,
}

#[derive(Debug, Clone, Serialize)]
struct GapSummary {
    params: ModelParams,
    degree: u32,
    dimension: usize,
    minimizer_degree: u32,
    gap: f64,
    lower_bound: f64,
    upper_bound: f64,
    upper_bound_holds: bool,
    pass: bool,
}

impl Experiment for GapConfig {
    const NAME: &'static str = "gap";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let params = params_from(s, s.or("n", 2)?, s.or("m", 1)?)?;
        let degree = s.or("degree", 10)?;
        if degree < 2 {
            return Err(ConfigError(format!("`degree` must be at least 2, got {degree}")));
        }
        Ok(Self { params, degree, dump_matrix: s.or("dump_matrix", false)? })
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let g = galerkin_gap(&self.params, self.degree)?;
        let bounds = check_gap_bounds(&self.params, g.gap)?;
        let summary = GapSummary {
            params: self.params,
            degree: self.degree,
            dimension: g.dimension,
            minimizer_degree: g.minimizer_degree,
            gap: g.gap,
            lower_bound: bounds.lower,
            upper_bound: bounds.upper,
            upper_bound_holds: bounds.upper_ok,
            pass: bounds.pass,
        };
        out.write_json("gap.json", &summary)?;
        let mut blocks = Table::new(&["degree", "block_min"]);
        for (k, v) in g.block_minima.iter().enumerate() {
            blocks.push(row![k + 1, *v]);
        }
        out.write_csv("blocks.csv", &blocks)?;
        if self.dump_matrix {
            let path = out.path().join("generator.mtx");
            let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            assemble_generator(&self.params, self.degree)?.write_coordinate(BufWriter::new(file))?;
            out.register(path);
        }
        println!("{}", serde_json::to_string_pretty(&summary)?);
        Ok(summary.pass)
    }
}

options!(
    /// Exact N = 2, m = 1 spectrum.
    SpectrumArgs {
        lambda: f64,
        mu: f64,
        /// Largest block index (at most 40).
        n_max: usize,
    }
);

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumConfig {
    pub lambda: f64,
    pub mu: f64,
    pub n_max: usize,
}

pub fn label_parts(label: SpectrumLabel) -> (&'static str, usize) {
    match label {
        SpectrumLabel::TwoLambdaPlusMu => ("two_lambda_plus_mu", 0),
        SpectrumLabel::TwoLambda => ("two_lambda", 0),
        SpectrumLabel::XPlus(n) => ("x_plus", n),
        SpectrumLabel::XMinus(n) => ("x_minus", n),
    }
}

impl Experiment for SpectrumConfig {
    const NAME: &'static str = "spectrum";

    fn from_settings(s: &Settings, _: &RunContext) -> ConfigResult<Self> {
        let cfg = Self { lambda: s.or("lambda", 1.0)?, mu: s.or("mu", 1.0)?, n_max: s.or("n_max", 10)? };
        exact_spectrum_2_1(cfg.lambda, cfg.mu, 0).map_err(|e| ConfigError(e.to_string()))?;
        if cfg.n_max > 40 {
            return Err(ConfigError(format!("`n_max` is at most 40, got {}", cfg.n_max)));
        }
        Ok(cfg)
    }

    fn run(&self, _: &RunContext, out: &mut OutputDir) -> Result<bool> {
        let records = exact_spectrum_2_1(self.lambda, self.mu, self.n_max)?;
        let mut t = Table::new(&["label", "n", "eigenvalue"]);
        for r in &records {
            let (name, n) = label_parts(r.label);
            t.push(row![name, n, r.eigenvalue]);
        }
        out.write_csv("spectrum.csv", &t)?;
        let min = records.iter().map(|r| r.eigenvalue).fold(f64::INFINITY, f64::min);
        println!("{} eigenvalues, smallest {min:.16e}", records.len());
        Ok(true)
    }
}
