use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector, C64, ONE, ZERO};

/// Tolerance on `| |ξ| - 1 |` for a vector to count as unit.
pub const UNIT_TOL: f64 = 1e-12;

/// A vector in `C^d ⊗ C^d` with its `d × d` matrix view.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteVector {
    d: usize,
    amps: CVector,
}

impl BipartiteVector {
    pub fn new(d: usize, amps: Vec<C64>) -> Result<Self> {
        Self::from_vector(d, CVector::from_vec(amps))
    }

    pub fn from_vector(d: usize, amps: CVector) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        if amps.len() != d * d {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for d = {d}, got {}",
                d * d,
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { d, amps })
    }

    /// Inverse of [`matrix_view`](Self::matrix_view).
    pub fn from_matrix(x: &CMatrix) -> Result<Self> {
        let (r, c) = x.shape();
        if r != c {
            return Err(Error::Dimension(format!("matrix view must be square, got {r}x{c}")));
        }
        let amps = CVector::from_fn(r * r, |idx, _| x[(idx / r, idx % r)]);
        Self::from_vector(r, amps)
    }

    pub fn zeros(d: usize) -> Self {
        Self { d, amps: CVector::zeros(d * d) }
    }

    /// `e_i ⊗ e_j`.
    pub fn basis(d: usize, i: usize, j: usize) -> Self {
        let mut v = Self::zeros(d);
        v.amps[i * d + j] = ONE;
        v
    }

    pub fn product(u: &CVector, v: &CVector) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::Dimension("product factors differ in length".into()));
        }
        let d = u.len();
        Self::from_vector(d, CVector::from_fn(d * d, |idx, _| u[idx / d] * v[idx % d]))
    }

    /// `ψ_+ = d^{-1/2} Σ_i e_i ⊗ e_i`.
    pub fn max_entangled(d: usize) -> Self {
        let mut v = Self::zeros(d);
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v.amps[i * d + i] = a;
        }
        v
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amps(&self) -> &CVector {
        &self.amps
    }

    pub fn into_amps(self) -> CVector {
        self.amps
    }

    pub fn amp(&self, i: usize, j: usize) -> C64 {
        self.amps[i * self.d + j]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NotUnit(self.norm()))
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn matrix_view(&self) -> CMatrix {
        let d = self.d;
        CMatrix::from_fn(d, d, |i, j| self.amps[i * d + j])
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn scaled(&self, z: C64) -> Self {
        Self { d: self.d, amps: self.amps.map(|a| a * z) }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "local dimensions differ");
        Self { d: self.d, amps: &self.amps + &other.amps }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.d, other.d, "local dimensions differ");
        Self { d: self.d, amps: &self.amps - &other.amps }
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|z| *z == ZERO)
    }

    /// `|ξ⟩⟨ξ|` as a `d² × d²` matrix.
    pub fn projector(&self) -> CMatrix {
        &self.amps * self.amps.adjoint()
    }
}

/// Hilbert-Schmidt distance of the pure states `|ξ⟩⟨ξ|`, `|η⟩⟨η|` via the
/// overlap closed form `√2 (1 - |⟨ξ|η⟩|²)^{1/2}`.
pub fn hs_distance_pure(xi: &BipartiteVector, eta: &BipartiteVector) -> f64 {
    let o = xi.inner(eta).norm();
    (2.0 * (1.0 - o * o).max(0.0)).sqrt()
}

/// Quotient (phase-minimized) distance `√2 (1 - |⟨ξ|η⟩|)^{1/2}`.
pub fn bures_distance_pure(xi: &BipartiteVector, eta: &BipartiteVector) -> f64 {
    let o = xi.inner(eta).norm();
    (2.0 * (1.0 - o).max(0.0)).sqrt()
}

/// `‖|ξ⟩⟨ξ| - |η⟩⟨η|‖_HS` computed from the projectors directly.
pub fn projector_distance(xi: &BipartiteVector, eta: &BipartiteVector) -> f64 {
    crate::linalg::hs_norm(&(xi.projector() - eta.projector()))
}

/// `min_{|z|=1} |ξ - z η|`, attained at the phase of `⟨η, ξ⟩`.
pub fn phase_min_distance(xi: &BipartiteVector, eta: &BipartiteVector) -> f64 {
    let o = eta.inner(xi);
    let z = if o.norm() == 0.0 { ONE } else { o / o.norm() };
    xi.sub(&eta.scaled(z)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_view_is_row_major() {
        let v = BipartiteVector::new(2, (0..4).map(|x| C64::new(x as f64, 0.0)).collect()).unwrap();
        let x = v.matrix_view();
        assert_eq!(x[(0, 1)], C64::new(1.0, 0.0));
        assert_eq!(x[(1, 0)], C64::new(2.0, 0.0));
        assert_eq!(BipartiteVector::from_matrix(&x).unwrap(), v);
        assert!((crate::linalg::hs_norm(&x) - v.norm()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_length_and_nan() {
        assert!(BipartiteVector::new(2, vec![ONE; 3]).is_err());
        assert!(matches!(
            BipartiteVector::new(1, vec![C64::new(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn product_layout() {
        let u = CVector::from_vec(vec![ONE, ZERO]);
        let v = CVector::from_vec(vec![ZERO, ONE]);
        assert_eq!(BipartiteVector::product(&u, &v).unwrap(), BipartiteVector::basis(2, 0, 1));
    }

    #[test]
    fn zero_vector_cannot_normalize() {
        assert!(BipartiteVector::zeros(3).normalized().is_err());
    }
}
