use serde::{Deserialize, Serialize};

use super::evolve::thermostat_flow;
use crate::error::Result;
use crate::grid::{apply_r, apply_r1, Axis, Grid2D, Grid3D, Interpolation, QPlan, QuadratureConfig, WeakThermostat};
use crate::model::maxwellian_density as gaussian;

/// Tolerance for smooth test densities.
const SMOOTH_TOL: f64 = 1e-6;
/// Tolerance for discontinuous data and for the coarser three-particle grid.
const ROUGH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCase {
    pub name: String,
    /// Pair index j of R₁Q₁ⱼR₁ = R₁Uⱼ.
    pub partner: usize,
    /// max |R₁Q₁ⱼR₁f − R₁Uⱼf|.
    pub average_vs_weak: f64,
    /// max |R₁Uⱼf − UⱼR₁f|.
    pub weak_commutator: f64,
    /// max |R₁Q₁ⱼR₁f − UⱼR₁f|.
    pub average_vs_commuted: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub cases: Vec<IdentityCase>,
    pub pass: bool,
}

impl IdentityReport {
    fn new(cases: Vec<IdentityCase>) -> Self {
        let pass = cases.iter().all(|c| c.pass);
        Self { cases, pass }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationCheck {
    pub kappa_tau: f64,
    /// ‖e^{−κτ(I−R₁)}φ − R₁φ‖₁.
    pub distance: f64,
    /// 2e^{−κτ}‖φ‖₁.
    pub bound: f64,
    pub pass: bool,
}

fn case(name: &str, partner: usize, lhs: Vec<f64>, mid: Vec<f64>, rhs: Vec<f64>, tol: f64) -> IdentityCase {
    let diff = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let average_vs_weak = diff(&lhs, &mid);
    let weak_commutator = diff(&mid, &rhs);
    let average_vs_commuted = diff(&lhs, &rhs);
    let pass = average_vs_weak.max(weak_commutator).max(average_vs_commuted) < tol;
    IdentityCase { name: name.into(), partner, average_vs_weak, weak_commutator, average_vs_commuted, tol, pass }
}

fn two_particle_case(name: &str, f: &Grid2D, plan: &QPlan, weak: &WeakThermostat, beta: f64, tol: f64) -> IdentityCase {
    let r1 = |x: &Grid2D| apply_r1(x, beta);
    let lhs = r1(&plan.apply(&r1(f)));
    let mid = r1(&weak.apply_axis(f, 1));
    let rhs = weak.apply_axis(&r1(f), 1);
    case(name, 2, lhs.into_values(), mid.into_values(), rhs.into_values(), tol)
}

/// Checks R₁Q₁₂R₁ = R₁U₂ = U₂R₁ on a fixed battery of two-particle densities.
///
/// Smooth data use `q` as given; the indicator square switches to bilinear
/// interpolation and the looser tolerance.
pub fn operator_identity_check(q: &QuadratureConfig) -> Result<IdentityReport> {
    let beta = 1.0;
    let axis = Axis::new(8.0, 129)?;
    let plan = QPlan::new(axis, q)?;
    let weak = WeakThermostat::new(axis, q, beta)?;
    let mut cases = Vec::new();

    let smooth: [(&str, Grid2D); 3] = [
        ("equilibrium", Grid2D::maxwellian(axis, beta)),
        (
            "shifted_product",
            Grid2D::from_fn(axis, |v| gaussian(1.0, v[0] - 0.8) * gaussian(0.6, v[1] + 0.5)),
        ),
        (
            "gaussian_mixture",
            Grid2D::from_fn(axis, |v| {
                0.6 * gaussian(1.5, v[0] + 0.7) * gaussian(0.8, v[1] - 0.4)
                    + 0.4 * (-(v[0] - 0.5).powi(2) - 0.6 * (v[0] - 0.5) * (v[1] - 1.0) - (v[1] - 1.0).powi(2)).exp() / 3.0
            }),
        ),
    ];
    for (name, f) in &smooth {
        cases.push(two_particle_case(name, &f.normalized()?, &plan, &weak, beta, SMOOTH_TOL));
    }

    // Bilinear interpolation and a finer grid: the error on jumps is second order in the spacing.
    let rough = q.with_interp(Interpolation::Bilinear);
    let axis = Axis::new(8.0, 257)?;
    let plan = QPlan::new(axis, &rough)?;
    let weak = WeakThermostat::new(axis, &rough, beta)?;
    let square = Grid2D::from_fn(axis, |v| if v[0].abs() <= 1.0 && v[1].abs() <= 1.0 { 1.0 } else { 0.0 }).normalized()?;
    cases.push(two_particle_case("indicator_square", &square, &plan, &weak, beta, ROUGH_TOL));
    Ok(IdentityReport::new(cases))
}

/// Checks R₁Q₁ⱼR₁ = R₁Uⱼ = UⱼR₁ for j ∈ {2, 3} on a three-particle grid.
pub fn three_particle_identity_check(q: &QuadratureConfig) -> Result<IdentityReport> {
    let beta = 1.0;
    let axis = Axis::new(7.0, 57)?;
    let plan = QPlan::new(axis, q)?;
    let weak = WeakThermostat::new(axis, q, beta)?;
    let f = Grid3D::from_fn(axis, |v| {
        gaussian(1.0, v[0] - 0.6) * gaussian(0.7, v[1] + 0.4) * gaussian(1.3, v[2] - 0.3)
            + 0.5 * gaussian(0.8, v[0]) * gaussian(1.0, v[1] - 0.5) * gaussian(0.9, v[2] + 0.6)
    })
    .normalized()?;
    let r1 = |x: &Grid3D| apply_r(x, 0, beta);
    let cases = [1, 2]
        .into_iter()
        .map(|j| {
            let lhs = r1(&plan.apply_pair(&r1(&f), 0, j));
            let mid = r1(&weak.apply_axis(&f, j));
            let rhs = weak.apply_axis(&r1(&f), j);
            case("three_particle_mixture", j + 1, lhs.into_values(), mid.into_values(), rhs.into_values(), ROUGH_TOL)
        })
        .collect();
    Ok(IdentityReport::new(cases))
}

/// ‖e^{−κτ(I−R₁)}φ − R₁φ‖₁ ≤ 2e^{−κτ}‖φ‖₁ at each κτ.
pub fn relaxation_bound_check(phi: &Grid2D, kappa_taus: &[f64], beta: f64) -> Vec<RelaxationCheck> {
    let projected = apply_r1(phi, beta);
    let norm = phi.l1_norm();
    kappa_taus
        .iter()
        .map(|&kappa_tau| {
            let decay = (-kappa_tau).exp();
            let distance = thermostat_flow(phi, decay, beta).l1_distance(&projected);
            let bound = 2.0 * decay * norm;
            RelaxationCheck { kappa_tau, distance, bound, pass: distance <= bound * (1.0 + 1e-12) }
        })
        .collect()
}
