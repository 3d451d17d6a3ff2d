use super::interp::Stencil;
use super::{for_each_line, Axis, Grid1D, Interpolation, QuadratureConfig, TensorGrid};
use crate::error::Result;
use crate::model::maxwellian_density;
use crate::quadrature::GaussHermite;

/// The weak thermostat as a dense matrix on one axis.
///
/// `(U f)(v)` averages over the angle, and over the bath velocity `w`,
/// `f(v cosθ + w sinθ)·g(−v sinθ + w cosθ)`. For each angle the inner integral
/// is rewritten in whichever variable keeps the Jacobian bounded:
///
/// * `|cosθ| ≥ |sinθ|`: integrate over the bath variable by Gauss–Hermite,
///   `(1/|c|) Σ_q w_q f((v + s u_q)/c)`, with `f` interpolated. With bilinear
///   interpolation the integral against the linear interpolant is done exactly
///   instead, so discontinuous data are not sampled at a few points.
/// * otherwise: trapezoid over the grid nodes `X`, `(1/|s|) Σ h f(X) g((cX − v)/s)`.
#[derive(Debug, Clone)]
pub struct WeakThermostat {
    axis: Axis,
    matrix: Vec<f64>,
}

impl WeakThermostat {
    pub fn new(axis: Axis, q: &QuadratureConfig, beta: f64) -> Result<Self> {
        q.validate()?;
        let n = axis.points();
        let nodes = axis.nodes();
        let trap = axis.weights();
        let gh = GaussHermite::new(q.gauss_nodes);
        let sigma = 1.0 / beta.sqrt();
        let n_theta = q.theta_nodes;
        let mut matrix = vec![0.0; n * n];
        for (i, &v) in nodes.iter().enumerate() {
            let row = &mut matrix[i * n..(i + 1) * n];
            for k in 0..n_theta {
                let theta = std::f64::consts::TAU * k as f64 / n_theta as f64;
                let (s, c) = theta.sin_cos();
                if c.abs() >= s.abs() && q.interp == Interpolation::Bilinear && s != 0.0 {
                    let scale = 1.0 / (c.abs() * n_theta as f64);
                    gaussian_against_linear(&nodes, v / c, (s * sigma / c).abs(), |j, w| row[j] += scale * w);
                } else if c.abs() >= s.abs() {
                    let scale = 1.0 / (c.abs() * n_theta as f64);
                    for (&u, &wq) in gh.nodes().iter().zip(gh.weights()) {
                        let x = (v + s * sigma * u) / c;
                        if let Some(st) = Stencil::new(&axis, x, q.interp) {
                            for (j, wj) in st.terms(n) {
                                row[j] += scale * wq * wj;
                            }
                        }
                    }
                } else {
                    let scale = 1.0 / (s.abs() * n_theta as f64);
                    for (j, (&x, &h)) in nodes.iter().zip(&trap).enumerate() {
                        row[j] += scale * h * maxwellian_density(beta, (c * x - v) / s);
                    }
                }
            }
        }
        Ok(Self { axis, matrix })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn apply_slice(&self, f: &[f64]) -> Vec<f64> {
        let n = self.axis.points();
        self.matrix.chunks_exact(n).map(|row| row.iter().zip(f).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply(&self, f: &Grid1D) -> Grid1D {
        assert_eq!(f.axis(), self.axis);
        TensorGrid { axis: self.axis, values: self.apply_slice(f.values()) }
    }

    /// Applies the weak thermostat along coordinate `k`, pointwise in the others.
    pub fn apply_axis<const D: usize>(&self, f: &TensorGrid<D>, k: usize) -> TensorGrid<D> {
        assert!(k < D);
        assert_eq!(f.axis(), self.axis);
        let n = self.axis.points();
        let mut out = vec![0.0; f.len()];
        let mut line = vec![0.0; n];
        for_each_line(n, D, k, |start, stride| {
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = f.values()[start + i * stride];
            }
            for (i, v) in self.apply_slice(&line).into_iter().enumerate() {
                out[start + i * stride] = v;
            }
        });
        TensorGrid { axis: self.axis, values: out }
    }
}

/// Weights `w_j` with `Σ_j w_j f_j = ∫ f_lin(x) N(x; mean, sd²) dx`, where `f_lin` is the
/// piecewise-linear interpolant of nodal values (zero outside the axis).
fn gaussian_against_linear(nodes: &[f64], mean: f64, sd: f64, mut emit: impl FnMut(usize, f64)) {
    use std::f64::consts::{FRAC_1_SQRT_2, PI};
    let cdf_diff = |a: f64, b: f64| {
        if a >= 0.0 {
            0.5 * (libm::erfc(a * FRAC_1_SQRT_2) - libm::erfc(b * FRAC_1_SQRT_2))
        } else if b <= 0.0 {
            0.5 * (libm::erfc(-b * FRAC_1_SQRT_2) - libm::erfc(-a * FRAC_1_SQRT_2))
        } else {
            0.5 * (libm::erf(b * FRAC_1_SQRT_2) - libm::erf(a * FRAC_1_SQRT_2))
        }
    };
    let pdf = |z: f64| (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    let h = nodes[1] - nodes[0];
    // Only cells within 40 standard deviations contribute.
    let reach = 40.0 * sd;
    let first = (((mean - reach - nodes[0]) / h).floor().max(0.0)) as usize;
    let last = ((((mean + reach - nodes[0]) / h).ceil()).max(0.0) as usize).min(nodes.len() - 1);
    for k in first..last {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
        let mass = cdf_diff(za, zb);
        let first_moment = sd * (pdf(za) - pdf(zb));
        emit(k, ((b - mean) * mass - first_moment) / h);
        emit(k + 1, (first_moment + (mean - a) * mass) / h);
    }
}

pub fn apply_u(f: &Grid1D, q: &QuadratureConfig, beta: f64) -> Result<Grid1D> {
    Ok(WeakThermostat::new(f.axis(), q, beta)?.apply(f))
}

pub fn apply_u_axis<const D: usize>(
    f: &TensorGrid<D>,
    k: usize,
    q: &QuadratureConfig,
    beta: f64,
) -> Result<TensorGrid<D>> {
    Ok(WeakThermostat::new(f.axis(), q, beta)?.apply_axis(f, k))
}

/// Weak thermostat applied to a mixture of centred Gaussians, in closed form per angle.
///
/// A centred Gaussian of variance `a` is mapped to the angle average of
/// Gaussians of variance `a cos²θ + sin²θ/β`. Components are `(weight, variance)`;
/// the result lists one component per (input, angle) on midpoint angle nodes.
pub fn mixture_u(components: &[(f64, f64)], beta: f64, theta_nodes: usize) -> Vec<(f64, f64)> {
    (0..theta_nodes)
        .flat_map(|k| {
            let theta = std::f64::consts::TAU * (k as f64 + 0.5) / theta_nodes as f64;
            let (s, c) = theta.sin_cos();
            components.iter().map(move |&(w, a)| (w / theta_nodes as f64, a * c * c + s * s / beta))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(beta: f64) -> Grid1D {
        Grid1D::maxwellian(Axis::new(8.0, 257).unwrap(), beta)
    }

    #[test]
    fn equilibrium_is_fixed() {
        let g = line(1.0);
        let u = apply_u(&g, &QuadratureConfig::default(), 1.0).unwrap();
        assert!(u.max_abs_diff(&g) < 1e-6, "{}", u.max_abs_diff(&g));
    }

    #[test]
    fn hot_maxwellian_second_moment_and_mass() {
        let f = line(0.5);
        let u = apply_u(&f, &QuadratureConfig::default(), 1.0).unwrap();
        let m2 = u.integrate_with(|v| v[0] * v[0]);
        assert!((m2 - 1.5).abs() < 1e-3, "{m2}");
        assert!((u.mass() - f.mass()).abs() < 1e-6);
    }

    #[test]
    fn mass_conserved_for_rough_data() {
        let axis = Axis::new(8.0, 257).unwrap();
        let f = Grid1D::from_fn(axis, |v| if v[0].abs() <= 2.0 { 0.25 } else { 0.0 });
        let q = QuadratureConfig::default().with_interp(Interpolation::Bilinear);
        let u = apply_u(&f, &q, 1.0).unwrap();
        assert!((u.mass() - f.mass()).abs() < 1e-4);
        assert!(u.min_value() > -1e-12);
    }

    #[test]
    fn matches_closed_form_on_gaussians() {
        let axis = Axis::new(8.0, 257).unwrap();
        let f = Grid1D::maxwellian(axis, 1.0 / 2.5);
        let u = apply_u(&f, &QuadratureConfig::default(), 1.0).unwrap();
        let mix = mixture_u(&[(1.0, 2.5)], 1.0, 512);
        let exact = Grid1D::from_fn(axis, |v| mix.iter().map(|&(w, a)| w * maxwellian_density(1.0 / a, v[0])).sum());
        assert!(u.max_abs_diff(&exact) < 1e-6, "{}", u.max_abs_diff(&exact));
    }

    #[test]
    fn axis_application_is_rowwise() {
        let axis = Axis::new(6.0, 41).unwrap();
        let q = QuadratureConfig { theta_nodes: 64, gauss_nodes: 32, interp: Interpolation::Cubic };
        let wt = WeakThermostat::new(axis, &q, 1.0).unwrap();
        let f = TensorGrid::<2>::from_fn(axis, |v| (1.0 + v[0] * v[0]) * maxwellian_density(0.7, v[1]));
        let out = wt.apply_axis(&f, 1);
        let row = wt.apply_slice(&f.values()[10 * 41..11 * 41]);
        assert_eq!(&out.values()[10 * 41..11 * 41], &row[..]);
    }
}
