//! Thin helpers over nalgebra for the dense complex linear algebra used
//! throughout: sorted SVD and Hermitian eigendecomposition, Kronecker
//! products, partial transposes and Hilbert-Schmidt pairings.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Singular value decomposition `m = U diag(s) V†` with `s` sorted
/// nonincreasing and the columns of `U`, `V` permuted to match.
pub struct SortedSvd {
    pub s: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

pub fn svd_sorted(m: &CMatrix) -> SortedSvd {
    let (rows, cols) = m.shape();
    let svd = SVD::new(m.clone(), true, true);
    let u_raw = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let r = svd.singular_values.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut u = CMatrix::zeros(rows, r);
    let mut v = CMatrix::zeros(cols, r);
    for (dst, &src) in order.iter().enumerate() {
        u.set_column(dst, &u_raw.column(src));
        // rows of V† are conjugated columns of V
        let row = v_t.row(src);
        for c in 0..cols {
            v[(c, dst)] = row[c].conj();
        }
    }
    SortedSvd { s, u, v }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending.
pub struct SortedEigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn eigh_sorted(m: &CMatrix) -> SortedEigh {
    let n = m.nrows();
    // symmetrize so tiny anti-Hermitian noise cannot leak into the solver
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    SortedEigh { values, vectors }
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigh_sorted(m).values[0]
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    CMatrix::from_fn(ar * br, ac * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

/// Transpose of the second tensor factor of an operator on `C^d ⊗ C^d`.
pub fn partial_transpose_second(m: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, a) = (r / d, r % d);
        let (j, b) = (c / d, c % d);
        m[(i * d + b, j * d + a)]
    })
}

/// Trace over the second factor: `(tr_2 M)[i][j] = Σ_a M[(i,a),(j,a)]`.
pub fn partial_trace_second(m: &CMatrix, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| (0..d).map(|a| m[(i * d + a, j * d + a)]).sum())
}

/// `tr(A B†)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn hs_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(a: &CMatrix) -> C64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Largest `|a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `⟨x|A|x⟩`, real part only (exact for Hermitian `A`).
pub fn quadratic_form(a: &CMatrix, x: &CVector) -> f64 {
    x.dotc(&(a * x)).re
}

/// Unitary polar factor `W = U V†` of a square matrix.
pub fn polar_unitary(m: &CMatrix) -> CMatrix {
    let svd = svd_sorted(m);
    &svd.u * svd.v.adjoint()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}
