use super::RescaledOptions;
use crate::error::{Error, Result};
use crate::grid::{apply_r1, discrete_maxwellian, Grid2D, QPlan, TensorGrid, WeakThermostat};

/// e^{−κs(I − R₁)}f = decay·f + (1 − decay)·R₁f with decay = e^{−κs}.
pub fn thermostat_flow(f: &Grid2D, decay: f64, beta: f64) -> Grid2D {
    apply_r1(f, beta).scale(1.0 - decay).add_scaled(decay, f)
}

/// φ_k(z) = Σ_j z^j/(j+k)! for k = 1, 2, 3.
fn phi_functions(z: f64) -> [f64; 3] {
    if z.abs() < 0.5 {
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut term = 1.0 / (1..=k + 1).product::<usize>() as f64;
            let mut j = 0;
            while term.abs() > 1e-18 || j < 3 {
                *slot += term;
                j += 1;
                term *= z / (j + k + 1) as f64;
            }
        }
        out
    } else {
        let e = z.exp_m1();
        let p1 = e / z;
        let p2 = (e - z) / (z * z);
        let p3 = (e - z - 0.5 * z * z) / (z * z * z);
        [p1, p2, p3]
    }
}

/// A function of the stiff part, stored by its values on the two spectral subspaces
/// (range of R₁ where the stiff part vanishes, and its complement).
#[derive(Clone, Copy)]
struct Split {
    on_thermalized: f64,
    on_rest: f64,
}

impl Split {
    fn apply(&self, f: &Grid2D, beta: f64) -> Grid2D {
        let r = apply_r1(f, beta);
        r.scale(self.on_thermalized).add_scaled(self.on_rest, &f.add_scaled(-1.0, &r))
    }
}

/// Evolves φ to rescaled time τ.
///
/// The thermostat part −κ(I − R₁) has a closed-form exponential, so the
/// equation is integrated by fourth-order exponential time differencing
/// (Cox–Matthews) with the Kac part as the explicit term. The step does not
/// depend on κ.
pub fn evolve_rescaled(phi: &Grid2D, lambda: f64, mu: f64, tau: f64, opts: &RescaledOptions) -> Result<Grid2D> {
    if !(lambda > 0.0 && lambda.is_finite() && mu >= 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParams(format!("need λ > 0 and μ ≥ 0, got λ = {lambda}, μ = {mu}")));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("τ must be non-negative, got {tau}")));
    }
    if !(opts.dt > 0.0) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {}", opts.dt)));
    }
    let steps = (tau / opts.dt).ceil() as usize;
    if steps > opts.step_budget {
        return Err(Error::StepBudget { steps, budget: opts.step_budget });
    }
    if steps == 0 {
        return Ok(phi.clone());
    }
    let h = tau / steps as f64;
    let kappa = mu / lambda;
    let beta = opts.beta;
    let plan = QPlan::new(phi.axis(), &opts.quadrature)?;
    let kac = |f: &Grid2D| plan.apply(f).add_scaled(-1.0, f).scale(2.0);

    let z = -kappa * h;
    let [p1h, _, _] = phi_functions(0.5 * z);
    let [p1, p2, p3] = phi_functions(z);
    let split = |rest: f64, flat: f64| Split { on_thermalized: flat, on_rest: rest };
    let e_half = split((0.5 * z).exp(), 1.0);
    let e_full = split(z.exp(), 1.0);
    let half_phi1 = split(0.5 * h * p1h, 0.5 * h);
    let f1 = split(h * (p1 - 3.0 * p2 + 4.0 * p3), h / 6.0);
    let f2 = split(h * (p2 - 2.0 * p3), h / 6.0);
    let f3 = split(h * (4.0 * p3 - p2), h / 6.0);

    let mut u = phi.clone();
    for _ in 0..steps {
        let nu = kac(&u);
        let eu = e_half.apply(&u, beta);
        let a = eu.add_scaled(1.0, &half_phi1.apply(&nu, beta));
        let na = kac(&a);
        let b = eu.add_scaled(1.0, &half_phi1.apply(&na, beta));
        let nb = kac(&b);
        let c = e_half.apply(&a, beta).add_scaled(1.0, &half_phi1.apply(&nb.scale(2.0).add_scaled(-1.0, &nu), beta));
        let nc = kac(&c);
        u = e_full
            .apply(&u, beta)
            .add_scaled(1.0, &f1.apply(&nu, beta))
            .add_scaled(2.0, &f2.apply(&na.add_scaled(1.0, &nb), beta))
            .add_scaled(1.0, &f3.apply(&nc, beta));
    }
    Ok(u)
}

/// The limit density g(v₁)·f̃(v₂, τ), where ∂f̃/∂τ = −2(I − U)f̃ and f̃(·, 0) is
/// the v₂-marginal of φ.
pub fn weak_limit_reference(phi: &Grid2D, tau: f64, opts: &RescaledOptions) -> Result<Grid2D> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("τ must be non-negative, got {tau}")));
    }
    let axis = phi.axis();
    let n = axis.points();
    let w = axis.weights();
    let marginal: Vec<f64> =
        (0..n).map(|j| (0..n).map(|i| w[i] * phi.values()[i * n + j]).sum()).collect();
    let weak = WeakThermostat::new(axis, &opts.quadrature, opts.beta)?;
    let rhs = |f: &[f64]| -> Vec<f64> { weak.apply_slice(f).iter().zip(f).map(|(u, x)| 2.0 * (u - x)).collect() };
    let axpy = |x: &[f64], a: f64, y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| p + a * q).collect() };

    // U is a contraction, so RK4 at a fixed small step is accurate and stable.
    let steps = (tau / opts.dt.min(0.01)).ceil() as usize;
    let mut f = marginal;
    if steps > 0 {
        let h = tau / steps as f64;
        for _ in 0..steps {
            let k1 = rhs(&f);
            let k2 = rhs(&axpy(&f, 0.5 * h, &k1));
            let k3 = rhs(&axpy(&f, 0.5 * h, &k2));
            let k4 = rhs(&axpy(&f, h, &k3));
            f = f
                .iter()
                .enumerate()
                .map(|(i, x)| x + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
        }
    }
    let g = discrete_maxwellian(&axis, opts.beta);
    let values = g.iter().flat_map(|gi| f.iter().map(move |fj| gi * fj)).collect();
    TensorGrid::from_values(axis, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{evolve_master, Axis, Grid1D, QuadratureConfig};
    use crate::model::{maxwellian_density as g, ModelParams};

    fn axis() -> Axis {
        Axis::new(8.0, 129).unwrap()
    }

    fn shifted() -> Grid2D {
        Grid2D::from_fn(axis(), |v| g(1.0, v[0] - 0.8) * g(0.6, v[1] + 0.5)).normalized().unwrap()
    }

    fn second_moment(f: &Grid1D) -> f64 {
        f.integrate_with(|v| v[0] * v[0])
    }

    #[test]
    fn phi_function_branches_agree() {
        for z in [-0.4999, 0.4999, -0.5001] {
            let a = phi_functions(z);
            let e = z.exp_m1();
            let direct = [e / z, (e - z) / (z * z), (e - z - 0.5 * z * z) / (z * z * z)];
            for k in 0..3 {
                assert!((a[k] - direct[k]).abs() < 1e-12);
            }
        }
        assert_eq!(phi_functions(0.0), [1.0, 0.5, 1.0 / 6.0]);
    }

    #[test]
    fn zero_time_and_equilibrium() {
        let f = shifted();
        let opts = RescaledOptions::default();
        assert_eq!(evolve_rescaled(&f, 0.1, 1.0, 0.0, &opts).unwrap(), f);
        let gamma = Grid2D::maxwellian(Axis::new(8.0, 257).unwrap(), 1.0);
        let out = evolve_rescaled(&gamma, 0.05, 1.0, 1.0, &opts).unwrap();
        assert!(out.max_abs_diff(&gamma) < 1e-6, "{}", out.max_abs_diff(&gamma));
    }

    #[test]
    fn matches_unscaled_master_equation() {
        // f̃(τ) is the master solution at t = τ/λ.
        let (lambda, mu) = (0.5, 1.0);
        let f = shifted();
        let opts = RescaledOptions::default();
        let a = evolve_rescaled(&f, lambda, mu, 0.5, &opts).unwrap();
        let p = ModelParams::unit(2, 1, lambda, mu).unwrap();
        let b = evolve_master(&f, &p, 1.0, 0.005, &QuadratureConfig::default()).unwrap();
        assert!(a.l1_distance(&b) < 1e-7, "{}", a.l1_distance(&b));
        assert!((a.mass() - f.mass()).abs() < 1e-6);
    }

    #[test]
    fn strong_coupling_limit_is_pure_kac() {
        let f = shifted();
        let a = evolve_rescaled(&f, 1e3, 1.0, 0.5, &RescaledOptions::default()).unwrap();
        let p = ModelParams::unit(2, 1, 1.0, 0.0).unwrap();
        let b = evolve_master(&f, &p, 0.5, 0.01, &QuadratureConfig::default()).unwrap();
        assert!(a.l1_distance(&b) < 1e-3, "{}", a.l1_distance(&b));
    }

    #[test]
    fn step_budget() {
        let opts = RescaledOptions { step_budget: 10, ..Default::default() };
        assert!(matches!(evolve_rescaled(&shifted(), 0.1, 1.0, 1.0, &opts), Err(Error::StepBudget { .. })));
    }

    #[test]
    fn weak_limit_examples() {
        let opts = RescaledOptions::default();
        let gamma = Grid2D::maxwellian(axis(), 1.0).normalized().unwrap();
        let out = weak_limit_reference(&gamma, 1.0, &opts).unwrap();
        assert!(out.max_abs_diff(&gamma) < 1e-6);

        // Product data: the initial profile is the second factor exactly.
        let hot = 1.0 / 2.5;
        let f = Grid2D::from_fn(axis(), |v| g(1.0, v[0]) * g(hot, v[1]));
        let at0 = weak_limit_reference(&f, 0.0, &opts).unwrap();
        assert!(at0.max_abs_diff(&f) < 1e-6);

        let n = axis().points();
        for tau in [0.5, 1.0, 2.0] {
            let out = weak_limit_reference(&f, tau, &opts).unwrap();
            let centre = axis().center();
            let row = Grid1D::from_values(axis(), out.values()[centre * n..(centre + 1) * n].to_vec()).unwrap();
            let profile = row.scale(1.0 / row.mass());
            let expected = 1.0 + 1.5 * (-tau).exp();
            assert!((second_moment(&profile) - expected).abs() < 1e-3, "τ={tau}");
        }
    }
}
