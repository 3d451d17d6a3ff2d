use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evolve::{evolve_rescaled, weak_limit_reference};
use super::RescaledOptions;
use crate::error::{Error, Result};
use crate::grid::Grid2D;

#[derive(Debug, Clone, PartialEq)]
pub struct VanHoveStudyConfig {
    pub initial: Grid2D,
    pub tau: f64,
    /// Strictly decreasing, all positive.
    pub lambdas: Vec<f64>,
    pub mu: f64,
    pub options: RescaledOptions,
    /// Order of the series cross-check run by callers that want one.
    pub dyson_order: usize,
    /// Required upper bound on the distance at the smallest λ.
    pub threshold: f64,
    /// Distances may fail to decrease by at most this much (quadrature noise).
    pub noise_floor: f64,
}

impl VanHoveStudyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidInput(format!("τ must be positive, got {}", self.tau)));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidParams(format!("μ must be positive, got {}", self.mu)));
        }
        if self.lambdas.is_empty() || self.lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidInput("λ values must be positive".into()));
        }
        if self.lambdas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("λ values must be strictly decreasing".into()));
        }
        if self.dyson_order < 1 {
            return Err(Error::InvalidInput("the series order must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub lambda: f64,
    pub l1_distance: f64,
    pub runtime_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub tau: f64,
    pub mu: f64,
    pub points: Vec<ConvergencePoint>,
    pub strictly_decreasing: bool,
    pub below_threshold: bool,
    /// Mass of the reference limit density minus the initial mass.
    pub reference_mass_drift: f64,
    pub pass: bool,
}

/// L¹ distance between the rescaled evolution and its weak-coupling limit, per λ.
pub fn convergence_study(cfg: &VanHoveStudyConfig) -> Result<ConvergenceReport> {
    cfg.validate()?;
    let reference = weak_limit_reference(&cfg.initial, cfg.tau, &cfg.options)?;
    let points = cfg
        .lambdas
        .par_iter()
        .map(|&lambda| {
            let start = Instant::now();
            let evolved = evolve_rescaled(&cfg.initial, lambda, cfg.mu, cfg.tau, &cfg.options)?;
            let l1_distance = evolved.l1_distance(&reference);
            Ok(ConvergencePoint { lambda, l1_distance, runtime_s: start.elapsed().as_secs_f64() })
        })
        .collect::<Result<Vec<_>>>()?;
    let strictly_decreasing = points.windows(2).all(|w| w[1].l1_distance < w[0].l1_distance + cfg.noise_floor);
    let below_threshold = points.last().is_some_and(|p| p.l1_distance < cfg.threshold);
    Ok(ConvergenceReport {
        tau: cfg.tau,
        mu: cfg.mu,
        reference_mass_drift: reference.mass() - cfg.initial.mass(),
        strictly_decreasing,
        below_threshold,
        pass: strictly_decreasing && below_threshold,
        points,
    })
}
