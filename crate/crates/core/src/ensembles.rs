//! Seeded generation of the random objects the experiments consume.
//!
//! Every draw is a function of a [`SeedSpec`]: a 64-bit seed plus a 32-bit
//! stream index selecting an independent ChaCha keystream. Monte Carlo loops
//! give each sample its own stream, so results do not depend on how samples
//! are spread across worker threads.

use nalgebra::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_k, Error, Result};
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::tensor::{truncate_matrix, BipartiteVector, DensityMatrix, HermitianOperator};

pub type StreamRng = ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub seed: u64,
    pub stream: u32,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl SeedSpec {
    pub fn new(seed: u64, stream: u32) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream as u64);
        rng
    }

    /// Same seed, different stream.
    pub fn with_stream(&self, stream: u32) -> Self {
        Self { seed: self.seed, stream }
    }

    /// A fresh seed namespace derived from `(seed, stream)`, with stream `idx`.
    /// Children of distinct parents do not share keystreams.
    pub fn child(&self, idx: u32) -> Self {
        let mixed = splitmix64(self.seed ^ splitmix64(((self.stream as u64) << 1) | 1));
        Self { seed: mixed, stream: idx }
    }
}

/// Evaluates `f(i)` for `i in 0..n` on the current rayon pool and returns the
/// results in index order, so any reduction over them is order-fixed.
pub fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    // column-major fill order is part of the reproducibility contract
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// `ρ = G G† / tr(G G†)` for a square `n × n` Ginibre `G`.
pub fn random_hs_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, n, rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace(&w).re;
    let mut rho = w.unscale(tr);
    // exact hermiticity
    rho = (&rho + rho.adjoint()).scale(0.5);
    rho
}

/// Hilbert-Schmidt random state on `C^d ⊗ C^d`.
pub fn random_hs_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let rho = random_hs_matrix(d * d, rng);
    DensityMatrix::new_unchecked(HermitianOperator::new(d, rho).expect("hermitian by construction"))
}

/// Haar-distributed unit vector in `C^n`.
pub fn random_haar_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(n, |_, _| complex_gaussian(rng));
        let norm = v.norm();
        if norm > 0.0 {
            return v.unscale(norm);
        }
    }
}

pub fn random_haar_bipartite<R: Rng + ?Sized>(d: usize, rng: &mut R) -> BipartiteVector {
    BipartiteVector::from_vector(d, random_haar_vector(d * d, rng)).expect("finite")
}

/// Unit vector of Schmidt rank at most `k`: truncated SVD of a Ginibre
/// matrix, renormalized. The law is invariant under local unitaries.
pub fn random_k_entangled<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Result<BipartiteVector> {
    check_k(k, d)?;
    loop {
        let g = ginibre(d, d, rng);
        let (t, norm) = truncate_matrix(&g, k);
        if norm > 0.0 {
            return BipartiteVector::from_matrix(&t.unscale(norm));
        }
    }
}

/// Haar unitary via QR of a Ginibre matrix with the phases of `R`'s diagonal
/// absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = QR::new(ginibre(d, d, rng));
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let p = r[(j, j)];
        if p.norm() > 0.0 {
            let phase = p / p.norm();
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// GUE-type Hermitian `n × n` matrix: real `N(0,1)` diagonal, complex
/// off-diagonal entries with `E|a_ij|² = 1/2`, optionally projected onto trace
/// zero, normalized to unit Hilbert-Schmidt norm.
pub fn random_hermitian_matrix<R: Rng + ?Sized>(n: usize, traceless: bool, rng: &mut R) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Dimension("n must be positive".into()));
    }
    if traceless && n == 1 {
        return Err(Error::Degenerate("no nonzero traceless direction for n = 1".into()));
    }
    loop {
        let mut m = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                if i == j {
                    let x: f64 = rng.sample(StandardNormal);
                    m[(i, i)] = C64::new(x, 0.0);
                } else {
                    let z = complex_gaussian(rng);
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
        }
        if traceless {
            let shift = linalg::trace(&m).re / n as f64;
            for i in 0..n {
                m[(i, i)] -= C64::new(shift, 0.0);
            }
        }
        let norm = linalg::hs_norm(&m);
        if norm > 0.0 {
            return Ok(m.unscale(norm));
        }
    }
}

pub fn random_hermitian_direction<R: Rng + ?Sized>(
    d: usize,
    traceless: bool,
    rng: &mut R,
) -> Result<HermitianOperator> {
    HermitianOperator::new(d, random_hermitian_matrix(d * d, traceless, rng)?)
}
