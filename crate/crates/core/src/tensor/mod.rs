//! Exact linear-algebra substrate on `C^d ⊗ C^d`.
//!
//! Vectors are stored as `d²` amplitudes in row-major pair order, so
//! `amp(i, j)` is the coefficient of `e_i ⊗ e_j` and the matrix view has
//! `X[i][j] = amp(i, j)`. Everything here is a pure function of its inputs.

mod operator;
mod schmidt;
mod vector;

pub use operator::{DensityMatrix, HermitianOperator, Operator};
pub use schmidt::{
    k_norm, k_truncate, polarization_split, schmidt_coefficients, schmidt_decompose, schmidt_rank,
    subset_truncate, truncate_matrix, SchmidtDecomposition, RANK_CUTOFF,
};
pub use vector::{
    bures_distance_pure, hs_distance_pure, phase_min_distance, projector_distance, BipartiteVector,
    UNIT_TOL,
};
