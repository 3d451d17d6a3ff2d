use std::collections::BTreeMap;

use super::interp::Stencil;
use super::{for_each_line, Axis, Grid2D, Grid3D, Interpolation, QuadratureConfig, TensorGrid};
use crate::error::Result;
use crate::model::maxwellian_density;

/// Bath Maxwellian on the axis nodes, rescaled to unit trapezoid mass.
///
/// Using the discrete normalization makes the thermostat exactly mass
/// conserving and idempotent on the grid.
pub fn discrete_maxwellian(axis: &Axis, beta: f64) -> Vec<f64> {
    let g: Vec<f64> = axis.nodes().iter().map(|&v| maxwellian_density(beta, v)).collect();
    let mass: f64 = g.iter().zip(axis.weights()).map(|(a, w)| a * w).sum();
    g.into_iter().map(|a| a / mass).collect()
}

/// Precomputed rotation average for one axis and quadrature.
///
/// Every node `(a, b)` (offsets from the centre, in units of the spacing)
/// lies on the circle of squared radius `a² + b²`. The average is computed
/// once per distinct radius on a common angle set, so the output is exactly
/// radial. Because the angle set is invariant under the symmetries of the
/// square, the input is first symmetrized and only one octant of angles is
/// visited.
#[derive(Debug, Clone)]
pub struct QPlan {
    axis: Axis,
    interp: Interpolation,
    /// Squared radius (in spacing units) of each class.
    radii_sq: Vec<u64>,
    /// Class of offset pair `(|a|, |b|)`, indexed `|a| * (c + 1) + |b|`.
    class_of: Vec<usize>,
    /// (cos, sin, weight) over the first octant.
    angles: Vec<(f64, f64, f64)>,
}

impl QPlan {
    pub fn new(axis: Axis, q: &QuadratureConfig) -> Result<Self> {
        q.validate()?;
        let c = axis.center();
        let mut keys = BTreeMap::new();
        for a in 0..=c as u64 {
            for b in 0..=a {
                keys.insert(a * a + b * b, 0usize);
            }
        }
        for (k, slot) in keys.values_mut().enumerate() {
            *slot = k;
        }
        let side = c + 1;
        let mut class_of = vec![0; side * side];
        for a in 0..side {
            for b in 0..side {
                class_of[a * side + b] = keys[&((a * a + b * b) as u64)];
            }
        }
        let radii_sq = keys.keys().copied().collect();

        let n_theta = q.theta_nodes;
        let octant = n_theta / 8;
        let angles = (0..=octant)
            .map(|k| {
                let theta = std::f64::consts::TAU * k as f64 / n_theta as f64;
                let mult = if k == 0 || k == octant { 4.0 } else { 8.0 };
                (theta.cos(), theta.sin(), mult / n_theta as f64)
            })
            .collect();
        Ok(Self { axis, interp: q.interp, radii_sq, class_of, angles })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn class_count(&self) -> usize {
        self.radii_sq.len()
    }

    /// Rotation average of an `n × n` row-major slice.
    pub fn apply_slice(&self, f: &[f64]) -> Vec<f64> {
        let n = self.axis.points();
        let c = self.axis.center();
        let sym = symmetrize(f, n);
        let h = self.axis.spacing();

        let class_avg: Vec<f64> = self
            .radii_sq
            .iter()
            .map(|&r2| {
                let r = (r2 as f64).sqrt() * h;
                self.angles
                    .iter()
                    .map(|&(cs, sn, w)| {
                        let (x, y) = (r * cs, r * sn);
                        match (Stencil::new(&self.axis, x, self.interp), Stencil::new(&self.axis, y, self.interp)) {
                            (Some(sx), Some(sy)) => {
                                w * sx
                                    .terms(n)
                                    .map(|(i, wx)| {
                                        let row = &sym[i * n..(i + 1) * n];
                                        wx * sy.terms(n).map(|(j, wy)| wy * row[j]).sum::<f64>()
                                    })
                                    .sum::<f64>()
                            }
                            _ => 0.0,
                        }
                    })
                    .sum()
            })
            .collect();

        let side = c + 1;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let a = i.abs_diff(c);
            for j in 0..n {
                let b = j.abs_diff(c);
                out[i * n + j] = class_avg[self.class_of[a * side + b]];
            }
        }
        out
    }

    pub fn apply(&self, f: &Grid2D) -> Grid2D {
        assert_eq!(f.axis(), self.axis, "plan built for a different axis");
        TensorGrid { axis: self.axis, values: self.apply_slice(f.values()) }
    }

    /// Rotation average in the plane of coordinates `(i, j)` of a 3-D grid.
    pub fn apply_pair(&self, f: &Grid3D, i: usize, j: usize) -> Grid3D {
        assert!(i < 3 && j < 3 && i != j);
        assert_eq!(f.axis(), self.axis, "plan built for a different axis");
        let n = self.axis.points();
        let k = 3 - i - j;
        let strides = [n * n, n, 1];
        let mut out = vec![0.0; f.len()];
        let mut slice = vec![0.0; n * n];
        for fixed in 0..n {
            for a in 0..n {
                for b in 0..n {
                    slice[a * n + b] = f.values()[fixed * strides[k] + a * strides[i] + b * strides[j]];
                }
            }
            let avg = self.apply_slice(&slice);
            for a in 0..n {
                for b in 0..n {
                    out[fixed * strides[k] + a * strides[i] + b * strides[j]] = avg[a * n + b];
                }
            }
        }
        TensorGrid { axis: self.axis, values: out }
    }
}

/// Average over the eight symmetries of the square lattice.
fn symmetrize(f: &[f64], n: usize) -> Vec<f64> {
    let m = n - 1;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (ri, rj) = (m - i, m - j);
            let s = f[i * n + j] + f[ri * n + j] + f[i * n + rj] + f[ri * n + rj]
                + f[j * n + i]
                + f[rj * n + i]
                + f[j * n + ri]
                + f[rj * n + ri];
            out[i * n + j] = 0.125 * s;
        }
    }
    out
}

/// Rotation average Q₁₂ of a two-particle grid function.
pub fn apply_q12(f: &Grid2D, q: &QuadratureConfig) -> Result<Grid2D> {
    Ok(QPlan::new(f.axis(), q)?.apply(f))
}

/// Q₁₂ together with the mass lost through the domain boundary.
pub fn apply_q12_with_leak(f: &Grid2D, q: &QuadratureConfig) -> Result<(Grid2D, f64)> {
    let out = apply_q12(f, q)?;
    let leak = f.mass() - out.mass();
    Ok((out, leak))
}

/// Q_{ij} on a three-particle grid function.
pub fn apply_q_pair(f: &Grid3D, i: usize, j: usize, q: &QuadratureConfig) -> Result<Grid3D> {
    Ok(QPlan::new(f.axis(), q)?.apply_pair(f, i, j))
}

/// Maxwellian thermostat on coordinate `k`: replaces the `k`-marginal by the bath.
pub fn apply_r<const D: usize>(f: &TensorGrid<D>, k: usize, beta: f64) -> TensorGrid<D> {
    assert!(k < D);
    let axis = f.axis();
    let n = axis.points();
    let w = axis.weights();
    let g = discrete_maxwellian(&axis, beta);
    let mut out = vec![0.0; f.len()];
    for_each_line(n, D, k, |start, stride| {
        let marginal: f64 = (0..n).map(|i| w[i] * f.values()[start + i * stride]).sum();
        for i in 0..n {
            out[start + i * stride] = g[i] * marginal;
        }
    });
    TensorGrid { axis, values: out }
}

pub fn apply_r1(f: &Grid2D, beta: f64) -> Grid2D {
    apply_r(f, 0, beta)
}

/// The thermostat in the ratio representation: conditional expectation of `h`
/// over coordinate `k` under the bath Maxwellian.
pub fn apply_p<const D: usize>(h: &TensorGrid<D>, k: usize, beta: f64) -> TensorGrid<D> {
    assert!(k < D);
    let axis = h.axis();
    let n = axis.points();
    let wg: Vec<f64> = axis.weights().iter().zip(discrete_maxwellian(&axis, beta)).map(|(w, g)| w * g).collect();
    let mut out = vec![0.0; h.len()];
    for_each_line(n, D, k, |start, stride| {
        let avg: f64 = (0..n).map(|i| wg[i] * h.values()[start + i * stride]).sum();
        for i in 0..n {
            out[start + i * stride] = avg;
        }
    });
    TensorGrid { axis, values: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::maxwellian_density as g;

    fn axis() -> Axis {
        Axis::new(8.0, 257).unwrap()
    }

    fn bump(v: [f64; 2], cx: f64, cy: f64, s: f64) -> f64 {
        (-((v[0] - cx).powi(2) + (v[1] - cy).powi(2)) / (2.0 * s * s)).exp()
    }

    #[test]
    fn radial_function_is_fixed() {
        let gamma = Grid2D::maxwellian(axis(), 1.0);
        let q = apply_q12(&gamma, &QuadratureConfig::default()).unwrap();
        assert!(q.max_abs_diff(&gamma) < 1e-6, "{}", q.max_abs_diff(&gamma));
        let hot = Grid2D::maxwellian(axis(), 0.5);
        let q = apply_q12(&hot, &QuadratureConfig::default()).unwrap();
        assert!(q.max_abs_diff(&hot) < 1e-6);
    }

    #[test]
    fn odd_function_averages_to_zero() {
        let f = Grid2D::from_fn(axis(), |v| v[0] * g(1.0, v[0]) * g(1.0, v[1]));
        let q = apply_q12(&f, &QuadratureConfig::default()).unwrap();
        assert!(q.max_abs() < 1e-12);
    }

    #[test]
    fn output_is_radial_and_mass_conserving() {
        let f = Grid2D::from_fn(axis(), |v| bump(v, 1.0, -0.5, 0.7) + 0.5 * bump(v, -1.5, 0.3, 0.5));
        let f = f.normalized().unwrap();
        let (q, leak) = apply_q12_with_leak(&f, &QuadratureConfig::default()).unwrap();
        assert!(leak.abs() < 1e-6, "leak {leak}");
        let a = axis();
        let (c, n) = (a.center(), a.points());
        // (3,4) and (5,0) share a radius.
        let v1 = q.get([c + 3, c + 4]);
        let v2 = q.get([c + 5, c]);
        let v3 = q.get([c, n - 1 - (c - 5)]);
        assert_eq!(v1, v2);
        assert_eq!(v1, v3);
    }

    #[test]
    fn three_dimensional_pair_average() {
        let a = Axis::new(6.0, 49).unwrap();
        let f = Grid3D::from_fn(a, |v| g(1.0, v[0]) * g(1.0, v[1]) * (v[2] - 0.2).powi(2) * g(1.0, v[2]));
        let q = QuadratureConfig::default();
        // radial in (0,1): unchanged
        let out = apply_q_pair(&f, 0, 1, &q).unwrap();
        assert!(out.max_abs_diff(&f) < 1e-4, "{}", out.max_abs_diff(&f));
        let out = apply_q_pair(&f, 0, 2, &q).unwrap();
        assert!((out.mass() - f.mass()).abs() < 1e-5, "{}", out.mass() - f.mass());
    }

    #[test]
    fn thermostat_examples() {
        let a = axis();
        let gamma = Grid2D::maxwellian(a, 1.0);
        assert!(apply_r1(&gamma, 1.0).max_abs_diff(&gamma) < 1e-8);
        let shifted = Grid2D::from_fn(a, |v| g(1.0, v[0] - 1.0) * g(1.0, v[1]));
        assert!(apply_r1(&shifted, 1.0).max_abs_diff(&gamma) < 1e-6);
    }

    #[test]
    fn thermostat_is_idempotent_and_conservative() {
        let a = Axis::new(8.0, 65).unwrap();
        let f = Grid2D::from_fn(a, |v| bump(v, 0.7, 1.2, 0.9) * (1.0 + 0.3 * v[0].sin()));
        let r = apply_r1(&f, 1.0);
        let rr = apply_r1(&r, 1.0);
        assert!(rr.l1_distance(&r) < 1e-10);
        assert!((r.mass() - f.mass()).abs() < 1e-12);
        let r2 = apply_r(&f, 1, 2.0);
        assert!((r2.mass() - f.mass()).abs() < 1e-12);
    }

    #[test]
    fn p_fixes_functions_independent_of_its_coordinate() {
        let a = Axis::new(6.0, 33).unwrap();
        let h = TensorGrid::<3>::from_fn(a, |v| 1.0 + 0.2 * v[0] * v[2]);
        let p = apply_p(&h, 1, 1.0);
        assert!(p.max_abs_diff(&h) < 1e-12);
        let p0 = apply_p(&h, 0, 1.0);
        assert!(p0.max_abs_diff(&TensorGrid::<3>::from_fn(a, |_| 1.0)) < 1e-12);
    }
}
