use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Symmetric matrix in compressed sparse row form.
#[derive(Debug, Clone)]
pub struct SparseSym {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl SparseSym {
    /// Builds from (row, col, value) triplets; duplicates are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; dim + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last = None;
        for (r, c, v) in sorted {
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
                continue;
            }
            cols.push(c);
            vals.push(v);
            row_start[r + 1] += 1;
            last = Some((r, c));
        }
        for r in 0..dim {
            row_start[r + 1] += row_start[r];
        }
        Self { dim, row_start, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for (r, out) in y.iter_mut().enumerate() {
            let span = self.row_start[r]..self.row_start[r + 1];
            *out = self.cols[span.clone()].iter().zip(&self.vals[span]).map(|(&c, v)| v * x[c]).sum();
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_start[r]..self.row_start[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenConfig {
    /// Blocks up to this size are solved densely.
    pub dense_threshold: usize,
    pub max_iterations: usize,
    /// Residual tolerance relative to the matrix scale.
    pub tol: f64,
}

impl Default for EigenConfig {
    fn default() -> Self {
        Self { dense_threshold: 600, max_iterations: 600, tol: 1e-12 }
    }
}

/// Smallest eigenpair by Lanczos with full reorthogonalization.
///
/// The start vector is fixed, so the result does not depend on scheduling.
pub fn lanczos_smallest(a: &SparseSym, cfg: &EigenConfig) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if n <= 2 {
        let eig = SymmetricEigen::new(a.to_dense());
        let k = eig.eigenvalues.imin();
        return Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()));
    }
    let scale = a.vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let mut q: Vec<Vec<f64>> = Vec::new();
    let start: Vec<f64> = (0..n).map(|i| 1.0 + ((i * 7919) % 101) as f64 / 101.0).collect();
    let norm = start.iter().map(|v| v * v).sum::<f64>().sqrt();
    q.push(start.iter().map(|v| v / norm).collect());
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let cap = cfg.max_iterations.min(n);
    let mut residual = f64::INFINITY;
    for k in 0..cap {
        a.matvec(&q[k], &mut w);
        let ak: f64 = w.iter().zip(&q[k]).map(|(x, y)| x * y).sum();
        alpha.push(ak);
        // Two passes of classical Gram-Schmidt against all previous vectors.
        for _ in 0..2 {
            for qj in &q {
                let c: f64 = w.iter().zip(qj).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(qj).for_each(|(x, y)| *x -= c * y);
            }
        }
        let bk = w.iter().map(|v| v * v).sum::<f64>().sqrt();

        let (theta, s) = smallest_ritz(&alpha, &beta);
        residual = bk * s[k].abs();
        let done = residual <= cfg.tol * scale || bk <= 1e-14 * scale || k + 1 == n;
        if done {
            let mut x = vec![0.0; n];
            for (qj, sj) in q.iter().zip(&s) {
                x.iter_mut().zip(qj).for_each(|(xi, qi)| *xi += sj * qi);
            }
            return Ok((theta, x));
        }
        beta.push(bk);
        q.push(w.iter().map(|v| v / bk).collect());
    }
    Err(Error::NoConvergence { iterations: cap, residual })
}

fn smallest_ritz(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    let mut t = DMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let j = eig.eigenvalues.imin();
    let v: DVector<f64> = eig.eigenvectors.column(j).into_owned();
    (eig.eigenvalues[j], v.iter().copied().collect())
}
