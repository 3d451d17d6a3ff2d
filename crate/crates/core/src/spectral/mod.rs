//! Exact two-particle spectrum and Hermite–Galerkin spectral gaps.
//!
//! Everything here works in β = 1 units; rates are unaffected by the
//! temperature, so callers may pass parameters at any β.

mod basis;
mod bounds;
mod closed_form;
mod eigen;
mod generator;

pub use basis::{enumerate_sector, HermiteBasisIndex};
pub use bounds::{check_gap_bounds, GapBoundReport, GAP_TOL};
pub use closed_form::{
    degree_two_matrix, exact_spectrum_2_1, gap_2_1, gap_eigenvector_2_1, x_pair, DegreeTwo, SpectrumLabel,
    SpectrumRecord,
};
pub use eigen::{lanczos_smallest, EigenConfig, SparseSym};
pub use generator::{
    assemble_generator, assemble_generator_capped, galerkin_gap, galerkin_gap_with, galerkin_spectrum,
    gap_eigenvector_residual, DegreeBlock, GalerkinGap, GeneratorMatrix, DEFAULT_DIMENSION_CAP,
};
