//! Tensor-grid densities and the deterministic two-particle master equation.
//!
//! All grids share one symmetric axis `[-V, V]` with an odd number of nodes,
//! so the origin is a node and the lattice is invariant under reflections and
//! coordinate swaps. Values are stored row-major (last coordinate fastest).

mod entropy;
mod evolve;
mod interp;
mod io;
mod ops;
mod weak;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::maxwellian_density;
use crate::quadrature::trapezoid_weights;

pub use entropy::{
    entropy_weights, gamma_weighted_entropy, h_representation, normalize_h, relative_entropy, from_h_representation,
    HConvention,
};
pub use evolve::{evolve_master, evolve_master_observed, master_generator, MasterStep};
pub use interp::{sample_1d, sample_2d};
pub use io::{read_grid, write_csv_slice, write_grid, GridHeader};
pub use ops::{apply_p, apply_q12, apply_q12_with_leak, apply_q_pair, apply_r, apply_r1, discrete_maxwellian, QPlan};
pub use weak::{apply_u, apply_u_axis, mixture_u, WeakThermostat};

/// Interpolation used when reading a grid function off-node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Piecewise linear, positivity preserving. Use for discontinuous data.
    Bilinear,
    /// Four-point Lagrange per axis. Fourth order on smooth data.
    #[default]
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Uniform angle nodes on the circle; must be a multiple of 8.
    pub theta_nodes: usize,
    /// Gauss–Hermite nodes for integrals against the bath Maxwellian.
    pub gauss_nodes: usize,
    pub interp: Interpolation,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { theta_nodes: 256, gauss_nodes: 64, interp: Interpolation::Cubic }
    }
}

impl QuadratureConfig {
    pub fn with_interp(self, interp: Interpolation) -> Self {
        Self { interp, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta_nodes < 16 || self.gauss_nodes < 16 {
            return Err(Error::InvalidInput(format!(
                "quadrature needs at least 16 nodes (theta {}, gauss {})",
                self.theta_nodes, self.gauss_nodes
            )));
        }
        if !self.theta_nodes.is_multiple_of(8) {
            return Err(Error::InvalidInput(format!("theta_nodes = {} is not a multiple of 8", self.theta_nodes)));
        }
        Ok(())
    }
}

/// Symmetric axis `[-half_width, half_width]` with an odd node count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    half_width: f64,
    points: usize,
}

impl Axis {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidInput(format!("half_width must be positive, got {half_width}")));
        }
        if points < 3 || points.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("points per axis must be odd and >= 3, got {points}")));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points - 1) as f64
    }

    /// Index of the node at the origin.
    pub fn center(&self) -> usize {
        (self.points - 1) / 2
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.node(i)).collect()
    }

    pub fn weights(&self) -> Vec<f64> {
        trapezoid_weights(self.points, self.spacing())
    }
}

/// Grid function on `axis^D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid<const D: usize> {
    axis: Axis,
    values: Vec<f64>,
}

pub type Grid1D = TensorGrid<1>;
pub type Grid2D = TensorGrid<2>;
pub type Grid3D = TensorGrid<3>;

impl<const D: usize> TensorGrid<D> {
    pub fn zeros(axis: Axis) -> Self {
        Self { axis, values: vec![0.0; axis.points().pow(D as u32)] }
    }

    pub fn from_values(axis: Axis, values: Vec<f64>) -> Result<Self> {
        let expected = axis.points().pow(D as u32);
        if values.len() != expected {
            return Err(Error::InvalidInput(format!("expected {expected} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        Ok(Self { axis, values })
    }

    pub fn from_fn<F: Fn([f64; D]) -> f64>(axis: Axis, f: F) -> Self {
        let nodes = axis.nodes();
        let n = axis.points();
        let values = (0..n.pow(D as u32))
            .map(|flat| f(Self::coords_of(flat, n).map(|i| nodes[i])))
            .collect();
        Self { axis, values }
    }

    fn coords_of(mut flat: usize, n: usize) -> [usize; D] {
        let mut idx = [0; D];
        for slot in idx.iter_mut().rev() {
            *slot = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, idx: [usize; D]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.axis.points() + i)
    }

    pub fn get(&self, idx: [usize; D]) -> f64 {
        self.values[self.index(idx)]
    }

    /// Node coordinates of a flat index.
    pub fn coords(&self, flat: usize) -> [f64; D] {
        Self::coords_of(flat, self.axis.points()).map(|i| self.axis.node(i))
    }

    /// Tensor trapezoid weights, one per value.
    pub fn cell_weights(&self) -> Vec<f64> {
        let w = self.axis.weights();
        let n = self.axis.points();
        (0..self.values.len()).map(|flat| Self::coords_of(flat, n).iter().map(|&i| w[i]).product()).collect()
    }

    /// Trapezoid integral of `f(v)·value(v)`.
    pub fn integrate_with<F: Fn([f64; D]) -> f64>(&self, f: F) -> f64 {
        let w = self.cell_weights();
        self.values.iter().zip(&w).enumerate().map(|(k, (v, w))| v * w * f(self.coords(k))).sum()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().zip(self.cell_weights()).map(|(v, w)| v * w).sum()
    }

    /// Rescaled to unit trapezoid mass.
    pub fn normalized(&self) -> Result<Self> {
        let mass = self.mass();
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::NotNormalized { mass });
        }
        Ok(self.map(|v| v / mass))
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { axis: self.axis, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    fn check_same_axis(&self, other: &Self) {
        assert_eq!(self.axis, other.axis, "grids live on different axes");
    }

    /// `self + scale·other`.
    pub fn add_scaled(&self, scale: f64, other: &Self) -> Self {
        self.check_same_axis(other);
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + scale * b).collect();
        Self { axis: self.axis, values }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.check_same_axis(other);
        self.values.iter().zip(&other.values).zip(self.cell_weights()).map(|((a, b), w)| w * (a - b).abs()).sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().zip(self.cell_weights()).map(|(a, w)| w * a.abs()).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.check_same_axis(other);
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Product Maxwellian at inverse temperature `beta` sampled on the nodes.
    pub fn maxwellian(axis: Axis, beta: f64) -> Self {
        Self::from_fn(axis, |v| v.iter().map(|&x| maxwellian_density(beta, x)).product())
    }
}

/// Visits every line of a `D`-dimensional row-major array along `axis_k`.
///
/// The callback receives the flat index of the line's first element and the stride.
pub(crate) fn for_each_line<F: FnMut(usize, usize)>(n: usize, dims: usize, axis_k: usize, mut f: F) {
    let stride = n.pow((dims - 1 - axis_k) as u32);
    let outer = n.pow(axis_k as u32);
    for o in 0..outer {
        for inner in 0..stride {
            f(o * stride * n + inner, stride);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_rules() {
        assert!(Axis::new(8.0, 256).is_err());
        assert!(Axis::new(-1.0, 5).is_err());
        let a = Axis::new(2.0, 5).unwrap();
        assert_eq!(a.nodes(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(a.center(), 2);
    }

    #[test]
    fn maxwellian_mass_and_moment() {
        let axis = Axis::new(8.0, 257).unwrap();
        let g = Grid2D::maxwellian(axis, 1.0);
        assert!((g.mass() - 1.0).abs() < 1e-12);
        let m2 = g.integrate_with(|v| v[0] * v[0] + v[1] * v[1]);
        assert!((m2 - 2.0).abs() < 1e-10);
        let g3 = Grid3D::maxwellian(Axis::new(6.0, 49).unwrap(), 2.0);
        assert!((g3.mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn indexing_is_row_major() {
        let axis = Axis::new(1.0, 3).unwrap();
        let g = Grid2D::from_fn(axis, |v| 10.0 * v[0] + v[1]);
        assert_eq!(g.get([0, 2]), -10.0 + 1.0);
        assert_eq!(g.coords(g.index([2, 0])), [1.0, -1.0]);
    }

    #[test]
    fn lines_cover_array_once() {
        let n = 4;
        for k in 0..3 {
            let mut seen = vec![0; n * n * n];
            for_each_line(n, 3, k, |start, stride| {
                for i in 0..n {
                    seen[start + i * stride] += 1;
                }
            });
            assert!(seen.iter().all(|&c| c == 1));
        }
    }
}
