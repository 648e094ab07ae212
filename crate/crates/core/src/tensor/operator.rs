use std::ops::Deref;

use super::vector::BipartiteVector;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE};

/// Hermiticity tolerance, entrywise.
const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// A (not necessarily Hermitian) operator on `C^d ⊗ C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    d: usize,
    mat: CMatrix,
}

impl Operator {
    pub fn new(d: usize, mat: CMatrix) -> Result<Self> {
        if d == 0 || mat.shape() != (d * d, d * d) {
            return Err(Error::Dimension(format!(
                "operator on C^{d}⊗C^{d} must be {0}x{0}, got {1}x{2}",
                d * d,
                mat.nrows(),
                mat.ncols()
            )));
        }
        if !linalg::is_finite(&mat) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, mat })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.d * self.d
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::hs_norm(&self.mat)
    }

    pub fn apply(&self, v: &BipartiteVector) -> BipartiteVector {
        BipartiteVector::from_vector(self.d, &self.mat * v.amps()).expect("shape preserved")
    }

    /// `⟨φ|A|ψ⟩`.
    pub fn matrix_element(&self, phi: &BipartiteVector, psi: &BipartiteVector) -> C64 {
        phi.amps().dotc(&(&self.mat * psi.amps()))
    }

    pub fn adjoint(&self) -> Self {
        Self { d: self.d, mat: self.mat.adjoint() }
    }
}

/// Hermitian operator on `C^d ⊗ C^d` with the Hilbert-Schmidt pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(Operator);

impl Deref for HermitianOperator {
    type Target = Operator;
    fn deref(&self) -> &Operator {
        &self.0
    }
}

impl HermitianOperator {
    /// Validates hermiticity within `1e-12` and then symmetrizes exactly.
    pub fn new(d: usize, mat: CMatrix) -> Result<Self> {
        let op = Operator::new(d, mat)?;
        let defect = linalg::hermiticity_defect(&op.mat);
        if defect > HERM_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrized(op))
    }

    fn symmetrized(op: Operator) -> Self {
        let mat = (&op.mat + op.mat.adjoint()).scale(0.5);
        Self(Operator { d: op.d, mat })
    }

    /// Hermitian part `(A + A†)/2` of an arbitrary matrix.
    pub fn hermitian_part(d: usize, mat: CMatrix) -> Result<Self> {
        Ok(Self::symmetrized(Operator::new(d, mat)?))
    }

    pub fn identity(d: usize) -> Self {
        Self(Operator { d, mat: CMatrix::identity(d * d, d * d) })
    }

    pub fn projector(v: &BipartiteVector) -> Self {
        Self::symmetrized(Operator { d: v.d(), mat: v.projector() })
    }

    /// The flip operator `u ⊗ v ↦ v ⊗ u`.
    pub fn swap(d: usize) -> Self {
        let mut mat = CMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for a in 0..d {
                mat[(a * d + i, i * d + a)] = ONE;
            }
        }
        Self(Operator { d, mat })
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.mat).re
    }

    /// `tr(A B)`, real for Hermitian pairs.
    pub fn hs_inner(&self, other: &Self) -> f64 {
        linalg::hs_inner(&self.mat, &other.mat).re
    }

    pub fn expectation(&self, v: &BipartiteVector) -> f64 {
        linalg::quadratic_form(&self.mat, v.amps())
    }

    pub fn scaled(&self, x: f64) -> Self {
        Self(Operator { d: self.d, mat: self.mat.scale(x) })
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(Operator { d: self.d, mat: &self.mat + &other.mat })
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(Operator { d: self.d, mat: &self.mat - &other.mat })
    }

    /// Eigenvalues ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigh_sorted(&self.mat).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty")
    }

    pub fn partial_transpose(&self) -> Self {
        Self(Operator { d: self.d, mat: linalg::partial_transpose_second(&self.mat, self.d) })
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl Deref for DensityMatrix {
    type Target = HermitianOperator;
    fn deref(&self) -> &HermitianOperator {
        &self.0
    }
}

impl DensityMatrix {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotState(format!("trace {tr}")));
        }
        let lmin = op.min_eigenvalue();
        if lmin < -PSD_TOL {
            return Err(Error::NotState(format!("eigenvalue {lmin}")));
        }
        Ok(Self(op))
    }

    /// Skips validation; the caller guarantees the invariants.
    pub(crate) fn new_unchecked(op: HermitianOperator) -> Self {
        Self(op)
    }

    pub fn pure(v: &BipartiteVector) -> Result<Self> {
        v.require_unit()?;
        Ok(Self(HermitianOperator::projector(v)))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(HermitianOperator::identity(d).scaled(1.0 / (d * d) as f64))
    }

    /// `p |ψ_+⟩⟨ψ_+| + (1 - p) I / d²`.
    pub fn isotropic(d: usize, p: f64) -> Self {
        let proj = HermitianOperator::projector(&BipartiteVector::max_entangled(d));
        Self(proj.scaled(p).add(&HermitianOperator::identity(d).scaled((1.0 - p) / (d * d) as f64)))
    }

    pub fn as_hermitian(&self) -> &HermitianOperator {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        self.hs_inner(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_flips_products() {
        let s = HermitianOperator::swap(3);
        let v = s.apply(&BipartiteVector::basis(3, 0, 2));
        assert_eq!(v, BipartiteVector::basis(3, 2, 0));
        assert!((s.trace() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(4, 4);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(HermitianOperator::new(2, m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_matrix_checks() {
        assert!(DensityMatrix::new(HermitianOperator::identity(2)).is_err());
        let mm = DensityMatrix::maximally_mixed(2);
        assert!((mm.purity() - 0.25).abs() < 1e-15);
        let bad = HermitianOperator::swap(2).scaled(0.5);
        assert!(DensityMatrix::new(bad).is_err());
    }

    #[test]
    fn hs_inner_is_trace_of_product() {
        let a = HermitianOperator::swap(2);
        let b = HermitianOperator::identity(2);
        assert!((a.hs_inner(&b) - 2.0).abs() < 1e-15);
        assert!((a.hs_inner(&a) - 4.0).abs() < 1e-15);
    }
}
