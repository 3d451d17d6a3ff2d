use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{enumerate_sector, HermiteBasisIndex};
use super::closed_form::{gap_2_1, gap_eigenvector_2_1};
use super::eigen::{lanczos_smallest, EigenConfig, SparseSym};
use crate::error::{Error, Result};
use crate::model::{gamma_coefficient, ln_factorial, ModelParams};

pub const DEFAULT_DIMENSION_CAP: usize = 200_000;

/// One invariant block: all basis elements of a single total degree.
#[derive(Debug, Clone)]
pub struct DegreeBlock {
    pub degree: u32,
    /// Offset of the block's first basis element in the global ordering.
    pub offset: usize,
    pub basis: Vec<HermiteBasisIndex>,
    /// Block-local (row, col, value).
    pub entries: Vec<(usize, usize, f64)>,
}

impl DegreeBlock {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn sparse(&self) -> SparseSym {
        SparseSym::from_triplets(self.dim(), &self.entries)
    }
}

/// The generator restricted to the symmetrized orthonormal Hermite basis of
/// total degree 1..=D. Total degree is preserved, so the matrix is
/// block-diagonal with one block per degree.
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    pub params: ModelParams,
    pub degree_cutoff: u32,
    pub blocks: Vec<DegreeBlock>,
}

impl GeneratorMatrix {
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(DegreeBlock::dim).sum()
    }

    pub fn block(&self, degree: u32) -> Option<&DegreeBlock> {
        self.blocks.iter().find(|b| b.degree == degree)
    }

    /// Global (row, col, value) entries.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.blocks.iter().flat_map(|b| b.entries.iter().map(move |&(r, c, v)| (r + b.offset, c + b.offset, v)))
    }

    /// max |L_ij − L_ji| over all entries.
    pub fn symmetry_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let d = b.dense();
                (0..b.dim())
                    .flat_map(|i| (0..i).map(move |j| (i, j)))
                    .map(|(i, j)| (d[(i, j)] - d[(j, i)]).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Coordinate text dump: one `row col value` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "% dimension {}", self.dimension())?;
        for (r, c, v) in self.triplets() {
            writeln!(out, "{r} {c} {v:.16e}")?;
        }
        Ok(())
    }
}

/// Assembles the generator up to total degree `degree_cutoff`.
pub fn assemble_generator(params: &ModelParams, degree_cutoff: u32) -> Result<GeneratorMatrix> {
    assemble_generator_capped(params, degree_cutoff, DEFAULT_DIMENSION_CAP)
}

pub fn assemble_generator_capped(params: &ModelParams, degree_cutoff: u32, cap: usize) -> Result<GeneratorMatrix> {
    params.validate_pairs()?;
    if params.n_thermostated > params.n_particles {
        return Err(Error::InvalidParams("more thermostated particles than particles".into()));
    }
    if degree_cutoff == 0 {
        return Err(Error::InvalidInput("degree cutoff must be at least 1".into()));
    }
    let (n, m) = (params.n_particles, params.n_thermostated);
    let mut bases = Vec::new();
    let mut dim = 0usize;
    for degree in 1..=degree_cutoff {
        let basis = enumerate_sector(n, m, degree);
        dim += basis.len();
        if dim > cap {
            return Err(Error::DimensionCap { dim, cap });
        }
        bases.push((degree, basis));
    }
    let mut offset = 0;
    let blocks = bases
        .into_iter()
        .map(|(degree, basis)| {
            let entries = assemble_block(params, &basis)?;
            let block = DegreeBlock { degree, offset, basis, entries };
            offset += block.dim();
            Ok(block)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GeneratorMatrix { params: *params, degree_cutoff, blocks })
}

fn assemble_block(params: &ModelParams, basis: &[HermiteBasisIndex]) -> Result<Vec<(usize, usize, f64)>> {
    let m = params.n_thermostated;
    let lookup: HashMap<&[u32], usize> = basis.iter().enumerate().map(|(k, b)| (b.degrees(), k)).collect();
    let orbit: Vec<f64> = basis.iter().map(|b| b.orbit_size(m)).collect();
    let columns = basis
        .par_iter()
        .enumerate()
        .map(|(col, rep)| {
            let image = apply_generator(params, rep.degrees())?;
            // Fold each image term onto its orbit representative.
            let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
            for (degrees, c) in image {
                let canon = HermiteBasisIndex(degrees).canonical(m);
                let row = lookup[canon.degrees()];
                *acc.entry(row).or_default() += c;
            }
            let mut entries: Vec<_> = acc
                .into_iter()
                .filter(|&(_, v)| v != 0.0)
                .map(|(row, v)| (row, col, (orbit[col] / orbit[row]).sqrt() * v))
                .collect();
            entries.sort_by_key(|&(r, _, _)| r);
            Ok(entries)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(columns.into_iter().flatten().collect())
}

/// Coefficients of L ψ_α in the orthonormal product basis. Ordered, so the
/// sums built from it do not depend on hash seeds.
fn apply_generator(params: &ModelParams, degrees: &[u32]) -> Result<BTreeMap<Vec<u32>, f64>> {
    let n = degrees.len();
    let m = params.n_thermostated;
    let lambda = params.kac_rate;
    let excited = degrees[..m].iter().filter(|&&d| d > 0).count() as f64;
    let mut out: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    out.insert(degrees.to_vec(), n as f64 * lambda + params.thermostat_rate * excited);
    let pair_rate = 2.0 * lambda / (n as f64 - 1.0);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (degrees[i], degrees[j]);
            if a % 2 == 1 || b % 2 == 1 {
                continue;
            }
            for (t, c) in pair_average(a / 2, b / 2)? {
                let mut target = degrees.to_vec();
                target[i] = 2 * t;
                target[j] = a + b - 2 * t;
                *out.entry(target).or_default() -= pair_rate * c;
            }
        }
    }
    Ok(out)
}

/// Rotation average of ψ_{2a1}(v_i)ψ_{2a2}(v_j), as coefficients on ψ_{2t}ψ_{2n−2t}.
fn pair_average(a1: u32, a2: u32) -> Result<Vec<(u32, f64)>> {
    let n = (a1 + a2) as usize;
    let gamma = gamma_coefficient(a1 as usize, a2 as usize)?;
    let ln_in = ln_factorial(2 * a1 as usize) + ln_factorial(2 * a2 as usize);
    Ok((0..=n)
        .map(|t| {
            let ln = ln_factorial(n) - ln_factorial(t) - ln_factorial(n - t)
                + 0.5 * (ln_factorial(2 * t) + ln_factorial(2 * n - 2 * t) - ln_in);
            (t as u32, gamma * ln.exp())
        })
        .collect())
}

/// Smallest eigenvalue of one block.
fn block_smallest(block: &DegreeBlock, cfg: &EigenConfig) -> Result<(f64, Vec<f64>)> {
    if block.dim() <= cfg.dense_threshold {
        let eig = SymmetricEigen::new(block.dense());
        let k = eig.eigenvalues.imin();
        Ok((eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect()))
    } else {
        lanczos_smallest(&block.sparse(), cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GalerkinGap {
    pub gap: f64,
    pub dimension: usize,
    /// Total degree of the block holding the minimizer.
    pub minimizer_degree: u32,
    /// Squared norm of the minimizer on total degree ≤ 2.
    pub degree_two_mass: f64,
    /// Smallest eigenvalue of each block, indexed by degree − 1.
    pub block_minima: Vec<f64>,
}

pub fn galerkin_gap(params: &ModelParams, degree_cutoff: u32) -> Result<GalerkinGap> {
    galerkin_gap_with(&assemble_generator(params, degree_cutoff)?, &EigenConfig::default())
}

pub fn galerkin_gap_with(matrix: &GeneratorMatrix, cfg: &EigenConfig) -> Result<GalerkinGap> {
    let mut best: Option<(f64, u32)> = None;
    let mut block_minima = Vec::with_capacity(matrix.blocks.len());
    for block in &matrix.blocks {
        let (value, _) = block_smallest(block, cfg)?;
        block_minima.push(value);
        // Ties go to the lower degree.
        if best.is_none_or(|(b, _)| value < b - 1e-13 * b.abs().max(1.0)) {
            best = Some((value, block.degree));
        }
    }
    let (gap, minimizer_degree) = best.ok_or_else(|| Error::InvalidInput("empty generator".into()))?;
    Ok(GalerkinGap {
        gap,
        dimension: matrix.dimension(),
        minimizer_degree,
        degree_two_mass: if minimizer_degree <= 2 { 1.0 } else { 0.0 },
        block_minima,
    })
}

/// Every eigenvalue of the truncated generator, ascending. Dense per block.
pub fn galerkin_spectrum(params: &ModelParams, degree_cutoff: u32) -> Result<Vec<f64>> {
    let matrix = assemble_generator(params, degree_cutoff)?;
    let mut all: Vec<f64> = matrix
        .blocks
        .iter()
        .flat_map(|b| SymmetricEigen::new(b.dense()).eigenvalues.iter().copied().collect::<Vec<_>>())
        .collect();
    all.sort_by(f64::total_cmp);
    Ok(all)
}

/// max |(L − Δ)v| for the closed-form gap eigenfunction v of the two-particle,
/// one-thermostat generator, taken in the assembled degree-2 block.
pub fn gap_eigenvector_residual(lambda: f64, mu: f64) -> Result<f64> {
    let params = ModelParams::unit(2, 1, lambda, mu)?;
    let matrix = assemble_generator(&params, 2)?;
    let block = matrix.block(2).ok_or_else(|| Error::InvalidState("no degree-2 block".into()))?;
    // Monic H₂ = √2 ψ₂.
    let (thermostated, free) = gap_eigenvector_2_1(lambda, mu);
    let mut v = DVector::zeros(block.dim());
    for (k, b) in block.basis.iter().enumerate() {
        match b.degrees() {
            [2, 0] => v[k] = thermostated * std::f64::consts::SQRT_2,
            [0, 2] => v[k] = free * std::f64::consts::SQRT_2,
            _ => {}
        }
    }
    let residual = &block.dense() * &v - gap_2_1(lambda, mu) * &v;
    Ok(residual.amax())
}
