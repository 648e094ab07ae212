use std::cmp::Ordering;

use super::vector::{BipartiteVector, UNIT_TOL};
use crate::error::{check_k, Error, Result};
use crate::linalg::{svd_sorted, CMatrix, CVector, C64};

/// Relative cutoff: `s_j` counts toward the Schmidt rank iff `s_j > RANK_CUTOFF · s_1`.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Singular values closer than this (relative to `s_1`) are treated as tied.
const TIE_TOL: f64 = 1e-12;

/// `ξ = Σ_j s_j u_j ⊗ v_j` with `s` nonincreasing and orthonormal frames
/// stored column-wise in `u` and `v`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub s: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

impl SchmidtDecomposition {
    pub fn d(&self) -> usize {
        self.s.len()
    }

    pub fn rank(&self) -> usize {
        let top = self.s.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&x| x > RANK_CUTOFF * top).count()
    }

    /// `Σ_{j ∈ idx} s_j u_j ⊗ v_j`.
    pub fn partial_sum(&self, idx: impl IntoIterator<Item = usize>) -> BipartiteVector {
        let d = self.d();
        let mut x = CMatrix::zeros(d, d);
        for j in idx {
            let s = C64::new(self.s[j], 0.0);
            // matrix view of u ⊗ v is u vᵀ
            x += (self.u.column(j) * self.v.column(j).transpose()) * s;
        }
        BipartiteVector::from_matrix(&x).expect("square by construction")
    }

    pub fn reconstruct(&self) -> BipartiteVector {
        self.partial_sum(0..self.d())
    }
}

fn lex_cmp(a: &CVector, b: &CVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Schmidt decomposition via the SVD of the matrix view.
///
/// Gauge: the first entry of each `u_j` with modulus above `1e-12` is made
/// real positive (the phase moves onto `v_j`). Runs of tied coefficients are
/// ordered lexicographically by `u_j`. The zero vector maps to `s = 0` with
/// identity frames.
pub fn schmidt_decompose(xi: &BipartiteVector) -> Result<SchmidtDecomposition> {
    let d = xi.d();
    if xi.amps().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    if xi.is_zero() {
        return Ok(SchmidtDecomposition {
            s: vec![0.0; d],
            u: CMatrix::identity(d, d),
            v: CMatrix::identity(d, d),
        });
    }
    let svd = svd_sorted(&xi.matrix_view());
    // X = U S V†, and the matrix view of u ⊗ v is u vᵀ, so v_j = conj(V e_j)
    let mut cols: Vec<(f64, CVector, CVector)> = (0..d)
        .map(|j| {
            let mut u = svd.u.column(j).into_owned();
            let mut v = svd.v.column(j).map(|z| z.conj());
            if let Some(p) = u.iter().copied().find(|z| z.norm() > 1e-12) {
                let phase = p / p.norm();
                u.iter_mut().for_each(|z| *z *= phase.conj());
                v.iter_mut().for_each(|z| *z *= phase);
            }
            (svd.s[j], u, v)
        })
        .collect();

    let top = cols[0].0;
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (cols[start].0 - cols[end].0) <= TIE_TOL * top {
            end += 1;
        }
        cols[start..end].sort_by(|a, b| lex_cmp(&a.1, &b.1));
        start = end;
    }

    let mut u = CMatrix::zeros(d, d);
    let mut v = CMatrix::zeros(d, d);
    let mut s = Vec::with_capacity(d);
    for (j, (sj, uj, vj)) in cols.into_iter().enumerate() {
        s.push(sj);
        u.set_column(j, &uj);
        v.set_column(j, &vj);
    }
    Ok(SchmidtDecomposition { s, u, v })
}

/// Schmidt coefficients only (cheaper: no frames are gauge fixed).
pub fn schmidt_coefficients(xi: &BipartiteVector) -> Vec<f64> {
    let mut s: Vec<f64> = nalgebra::SVD::new(xi.matrix_view(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn schmidt_rank(xi: &BipartiteVector) -> usize {
    let s = schmidt_coefficients(xi);
    let top = s[0];
    if top == 0.0 {
        0
    } else {
        s.iter().filter(|&&x| x > RANK_CUTOFF * top).count()
    }
}

/// `‖ξ‖^{(k)} = max_{ζ ∈ Ent_k^V} |⟨ξ, ζ⟩| = (Σ_{j≤k} s_j²)^{1/2}`.
pub fn k_norm(xi: &BipartiteVector, k: usize) -> Result<f64> {
    check_k(k, xi.d())?;
    let s = schmidt_coefficients(xi);
    Ok(s[..k].iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Best rank-`k` approximation of a square matrix and its HS norm.
pub fn truncate_matrix(x: &CMatrix, k: usize) -> (CMatrix, f64) {
    let svd = svd_sorted(x);
    let n = x.nrows();
    let mut out = CMatrix::zeros(n, n);
    let mut norm2 = 0.0;
    for j in 0..k.min(svd.s.len()) {
        let s = svd.s[j];
        if s == 0.0 {
            break;
        }
        norm2 += s * s;
        out += (svd.u.column(j) * svd.v.column(j).adjoint()) * C64::new(s, 0.0);
    }
    (out, norm2.sqrt())
}

/// `Σ_{j≤k} s_j u_j ⊗ v_j`; its norm equals `k_norm(ξ, k)`.
pub fn k_truncate(xi: &BipartiteVector, k: usize) -> Result<BipartiteVector> {
    check_k(k, xi.d())?;
    let (x, _) = truncate_matrix(&xi.matrix_view(), k);
    BipartiteVector::from_matrix(&x)
}

/// `ξ_Λ = Σ_{j ∈ Λ} s_j u_j ⊗ v_j` in the Schmidt frame of `ξ`, with `Λ`
/// given as 0-based positions in the nonincreasing coefficient order.
pub fn subset_truncate(xi: &BipartiteVector, subset: &[usize]) -> Result<BipartiteVector> {
    let d = xi.d();
    let mut seen = vec![false; d];
    for &j in subset {
        if j >= d {
            return Err(Error::InvalidIndices(format!("index {j} outside 0..{d}")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidIndices(format!("index {j} repeated")));
        }
    }
    let sd = schmidt_decompose(xi)?;
    Ok(sd.partial_sum(subset.iter().copied()))
}

/// `η_1 = (φ + ψ)/2`, `η_2 = (φ - ψ)/2` for unit `φ`, `ψ`; then
/// `Re⟨φ|A|ψ⟩ = ⟨η_1|A|η_1⟩ - ⟨η_2|A|η_2⟩` for Hermitian `A` and
/// `|η_1|² + |η_2|² = 1`.
pub fn polarization_split(
    phi: &BipartiteVector,
    psi: &BipartiteVector,
) -> Result<(BipartiteVector, BipartiteVector)> {
    if phi.d() != psi.d() {
        return Err(Error::Dimension("polarization of vectors with different d".into()));
    }
    for v in [phi, psi] {
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit(v.norm()));
        }
    }
    let half = C64::new(0.5, 0.0);
    Ok((phi.add(psi).scaled(half), phi.sub(psi).scaled(half)))
}
