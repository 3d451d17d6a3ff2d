use super::{Axis, Interpolation};

/// Interpolation stencil along one axis: first node index and up to four weights.
///
/// Nodes outside the axis are dropped (they read as zero).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stencil {
    pub first: isize,
    pub weights: [f64; 4],
    pub len: usize,
}

impl Stencil {
    pub fn new(axis: &Axis, x: f64, kind: Interpolation) -> Option<Self> {
        let n = axis.points();
        let t = (x + axis.half_width()) / axis.spacing();
        if !(t >= 0.0 && t <= (n - 1) as f64) {
            return None;
        }
        let i0 = (t.floor() as usize).min(n - 2);
        let s = t - i0 as f64;
        Some(match kind {
            Interpolation::Bilinear => Self { first: i0 as isize, weights: [1.0 - s, s, 0.0, 0.0], len: 2 },
            Interpolation::Cubic => {
                let (sm, s1, s2) = (s + 1.0, s - 1.0, s - 2.0);
                Self {
                    first: i0 as isize - 1,
                    weights: [-s * s1 * s2 / 6.0, sm * s1 * s2 / 2.0, -sm * s * s2 / 2.0, sm * s * s1 / 6.0],
                    len: 4,
                }
            }
        })
    }

    /// (node, weight) pairs that fall inside `0..n`.
    #[inline]
    pub fn terms(&self, n: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (0..self.len).filter_map(move |k| {
            let i = self.first + k as isize;
            (i >= 0 && (i as usize) < n).then(|| (i as usize, self.weights[k]))
        })
    }
}

/// Value of a 1-D grid function at `x`; zero outside the axis.
pub fn sample_1d(values: &[f64], axis: &Axis, x: f64, kind: Interpolation) -> f64 {
    let n = axis.points();
    Stencil::new(axis, x, kind).map_or(0.0, |s| s.terms(n).map(|(i, w)| w * values[i]).sum())
}

/// Value of a 2-D grid function (row index = first coordinate) at `(x, y)`.
pub fn sample_2d(values: &[f64], axis: &Axis, x: f64, y: f64, kind: Interpolation) -> f64 {
    let n = axis.points();
    let (Some(sx), Some(sy)) = (Stencil::new(axis, x, kind), Stencil::new(axis, y, kind)) else {
        return 0.0;
    };
    sx.terms(n)
        .map(|(i, wx)| {
            let row = &values[i * n..(i + 1) * n];
            wx * sy.terms(n).map(|(j, wy)| wy * row[j]).sum::<f64>()
        })
        .sum()
}
