//! Choi-Jamiołkowski machinery and the duality between k-entangled states
//! and k-block positive operators.
//!
//! Conventions: vectorization is row-major (`vec(X)[i·d + j] = X[i][j]`),
//! the Choi matrix is `C_Φ = Σ_ij E_ij ⊗ Φ(E_ij)`, Kraus maps act as
//! `Φ(ρ) = Σ_l A_l† ρ A_l`, and the partial transpose acts on the second
//! tensor factor.

use serde::Serialize;

use crate::ensembles::{random_unitary, SeedSpec};
use crate::error::{check_k, Error, Result};
use crate::linalg::{self, partial_trace_second, polar_unitary, CMatrix, CVector, C64};
use crate::seesaw::{quadratic_extremum_k, support_entk, ExtremalResult, SeeSawConfig, Sense};
use crate::tensor::{schmidt_rank, BipartiteVector, DensityMatrix, HermitianOperator};

/// Violations must exceed this to count; also the slack allowed on exact
/// membership tests.
pub const DECISION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

/// A linear map on `d × d` matrices, stored through its Choi matrix.
#[derive(Clone, Debug)]
pub struct QuantumMap {
    pub d: usize,
    pub choi: HermitianOperator,
    pub kraus: Option<Vec<CMatrix>>,
    pub tp: Tri,
    pub unital: Tri,
}

fn check_square(m: &CMatrix, n: usize, what: &str) -> Result<()> {
    if m.shape() != (n, n) {
        return Err(Error::Dimension(format!(
            "{what} must be {n}x{n}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

impl QuantumMap {
    fn with_flags(d: usize, choi: HermitianOperator, kraus: Option<Vec<CMatrix>>) -> Self {
        let mut m = Self { d, choi, kraus, tp: Tri::Unknown, unital: Tri::Unknown };
        m.tp = is_trace_preserving(&m, DECISION_TOL).into();
        m.unital = is_unital(&m, DECISION_TOL).into();
        m
    }

    pub fn from_choi(choi: HermitianOperator) -> Self {
        let d = choi.d();
        Self::with_flags(d, choi, None)
    }

    /// From the `d² × d²` matrix `S` with `vec(Φ(X)) = S vec(X)`.
    pub fn from_superoperator(d: usize, s: &CMatrix) -> Result<Self> {
        check_square(s, d * d, "superoperator")?;
        let c = CMatrix::from_fn(d * d, d * d, |r, col| {
            let (i, a) = (r / d, r % d);
            let (j, b) = (col / d, col % d);
            s[(a * d + b, i * d + j)]
        });
        Ok(Self::with_flags(d, HermitianOperator::new(d, c)?, None))
    }

    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let d = kraus
            .first()
            .map(|a| a.nrows())
            .ok_or_else(|| Error::Dimension("empty Kraus list".into()))?;
        for a in &kraus {
            check_square(a, d, "Kraus operator")?;
        }
        let mut c = CMatrix::zeros(d * d, d * d);
        for a in &kraus {
            // C = Σ_l |w_l⟩⟨w_l| with w_l[(i,a)] = conj(A_l[i][a])
            let w = CVector::from_fn(d * d, |idx, _| a[(idx / d, idx % d)].conj());
            c += &w * w.adjoint();
        }
        Ok(Self::with_flags(d, HermitianOperator::new(d, c)?, Some(kraus)))
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(vec![CMatrix::identity(d, d)]).expect("valid")
    }

    pub fn transpose(d: usize) -> Self {
        let s = CMatrix::from_fn(d * d, d * d, |r, c| {
            let (a, b) = (r / d, r % d);
            let (i, j) = (c / d, c % d);
            if a == j && b == i {
                linalg::ONE
            } else {
                linalg::ZERO
            }
        });
        Self::from_superoperator(d, &s).expect("valid")
    }

    /// `ρ ↦ tr(ρ) I / d`.
    pub fn depolarizing(d: usize) -> Self {
        let s = CMatrix::from_fn(d * d, d * d, |r, c| {
            let (a, b) = (r / d, r % d);
            let (i, j) = (c / d, c % d);
            if a == b && i == j {
                C64::new(1.0 / d as f64, 0.0)
            } else {
                linalg::ZERO
            }
        });
        Self::from_superoperator(d, &s).expect("valid")
    }

    /// The block `Φ(E_ij)` of the Choi matrix.
    pub fn image_of_unit(&self, i: usize, j: usize) -> CMatrix {
        let d = self.d;
        let c = self.choi.matrix();
        CMatrix::from_fn(d, d, |a, b| c[(i * d + a, j * d + b)])
    }

    /// `Φ(X) = Σ_ij X_ij Φ(E_ij)`.
    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        check_square(x, self.d, "input")?;
        let mut out = CMatrix::zeros(self.d, self.d);
        for i in 0..self.d {
            for j in 0..self.d {
                if x[(i, j)] != linalg::ZERO {
                    out += self.image_of_unit(i, j) * x[(i, j)];
                }
            }
        }
        Ok(out)
    }

    /// The superoperator matrix recovered from the Choi matrix.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.d;
        let c = self.choi.matrix();
        CMatrix::from_fn(d * d, d * d, |r, col| {
            let (a, b) = (r / d, r % d);
            let (i, j) = (col / d, col % d);
            c[(i * d + a, j * d + b)]
        })
    }
}

/// `tr Φ(ρ) = tr ρ` for all `ρ`, i.e. the trace of the Choi matrix over the
/// output factor is the identity.
pub fn is_trace_preserving(m: &QuantumMap, tol: f64) -> bool {
    let pt = partial_trace_second(m.choi.matrix(), m.d);
    linalg::hs_norm(&(pt - CMatrix::identity(m.d, m.d))) <= tol
}

/// `Φ(I) = I`.
pub fn is_unital(m: &QuantumMap, tol: f64) -> bool {
    let d = m.d;
    let mut img = CMatrix::zeros(d, d);
    for i in 0..d {
        img += m.image_of_unit(i, i);
    }
    linalg::hs_norm(&(img - CMatrix::identity(d, d))) <= tol
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockPositivity {
    Refuted,
    NotRefuted,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockPositivityCertificate {
    pub k: usize,
    pub status: BlockPositivity,
    /// Smallest `⟨η|C|η⟩` found over Schmidt-rank-≤k unit `η`.
    pub min_estimate: f64,
    /// `true` when the status is proven: a refutation always is, and
    /// `not_refuted` is when `k = d` or the Choi matrix is PSD.
    pub exact: bool,
    pub witness: BipartiteVector,
    pub search: ExtremalResult,
}

/// k-block positivity of the Choi matrix, refuted by exhibiting a rank-≤k
/// `η` with `⟨η|C|η⟩ < 0`.
pub fn k_block_positivity(m: &QuantumMap, k: usize, cfg: &SeeSawConfig) -> Result<BlockPositivityCertificate> {
    check_k(k, m.d)?;
    let search = quadratic_extremum_k(&m.choi, k, Sense::Min, cfg)?;
    let min_estimate = search.value;
    let psd = m.choi.min_eigenvalue() >= -DECISION_TOL;
    let status = if min_estimate < -DECISION_TOL {
        BlockPositivity::Refuted
    } else {
        BlockPositivity::NotRefuted
    };
    Ok(BlockPositivityCertificate {
        k,
        status,
        min_estimate,
        exact: k == m.d || psd || status == BlockPositivity::Refuted,
        witness: search.witness[0].clone(),
        search,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DualCertificate {
    pub k: usize,
    /// Membership of `y` in the base of the k-block positive cone via the
    /// polar-of-base criterion: `max_{x ∈ d·Ent_k^1} ⟨e - y, x - e⟩ ≤ 1`.
    pub member_bases: bool,
    pub member_direct: bool,
    pub routes_agree: bool,
    /// `1 - max_{x} ⟨e - y, x - e⟩`.
    pub slack_bases: f64,
    /// `min_{η ∈ Ent_k^V} ⟨η|y|η⟩`.
    pub slack_direct: f64,
    /// `|slack_bases - d · slack_direct|`; zero in exact arithmetic.
    pub identity_defect: f64,
    pub witness_bases: BipartiteVector,
    pub witness_direct: BipartiteVector,
}

/// Decides `y ∈ BP_k ∩ {⟨y, e⟩ = 1}` with `e = I/d` by two routes: the
/// polar relation between bases of dual cones (through the support function
/// of `d·Ent_k^1`) and the direct minimum of `⟨η|y|η⟩` over rank-≤k `η`.
pub fn base_dual_test(y: &HermitianOperator, k: usize, cfg: &SeeSawConfig) -> Result<DualCertificate> {
    let d = y.d();
    check_k(k, d)?;
    let df = d as f64;
    let e = HermitianOperator::identity(d).scaled(1.0 / df);
    let norm = y.hs_inner(&e);
    if (norm - 1.0).abs() > DECISION_TOL {
        return Err(Error::Normalization(norm));
    }

    let z = e.sub(y);
    let support = support_entk(&z, k, cfg)?;
    // max over x = dρ of ⟨z, x - e⟩ = d·h(z) - ⟨z, e⟩
    let max_pairing = df * support.value - z.hs_inner(&e);
    let slack_bases = 1.0 - max_pairing;

    let direct = quadratic_extremum_k(y, k, Sense::Min, cfg)?;
    let slack_direct = direct.value;

    let member_bases = slack_bases >= -DECISION_TOL * df;
    let member_direct = slack_direct >= -DECISION_TOL;
    Ok(DualCertificate {
        k,
        member_bases,
        member_direct,
        routes_agree: member_bases == member_direct,
        slack_bases,
        slack_direct,
        identity_defect: (slack_bases - df * slack_direct).abs(),
        witness_bases: support.witness[0].clone(),
        witness_direct: direct.witness[0].clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PptResult {
    pub ppt: bool,
    pub min_eigenvalue: f64,
    /// Eigenvector of the partial transpose for `min_eigenvalue`.
    #[serde(skip)]
    pub min_eigenvector: CVector,
}

pub fn ppt_test(rho: &DensityMatrix, tol: f64) -> PptResult {
    let pt = linalg::partial_transpose_second(rho.matrix(), rho.d());
    let eig = linalg::eigh_sorted(&pt);
    PptResult {
        ppt: eig.values[0] >= -tol,
        min_eigenvalue: eig.values[0],
        min_eigenvector: eig.vectors.column(0).into_owned(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LowerCert {
    /// `k = d`: every state qualifies.
    AllStates,
    /// Pure state whose vector has Schmidt rank at most `k`.
    PureLowRank { rank: usize, vector: BipartiteVector },
    /// Positive partial transpose on `C^2 ⊗ C^2`, where it is equivalent to separability.
    PptTwoQubit { min_eigenvalue: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub criterion: String,
    /// k-block positive operator `W` with `tr(Wρ) = value < 0`.
    pub witness: HermitianOperator,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipBracket {
    pub k: usize,
    pub decided: Verdict,
    pub lower_cert: Option<LowerCert>,
    pub upper_cert: Option<Violation>,
}

#[derive(Clone, Debug)]
pub struct BracketConfig {
    pub seesaw: SeeSawConfig,
    pub ppt_tol: f64,
    /// Extra operators known to be k-block positive for the `k` under test.
    pub witnesses: Vec<HermitianOperator>,
}

impl Default for BracketConfig {
    fn default() -> Self {
        Self { seesaw: SeeSawConfig { restarts: 4, ..SeeSawConfig::default() }, ppt_tol: DECISION_TOL, witnesses: Vec::new() }
    }
}

/// Largest fidelity of `ρ` with a maximally entangled vector `(U ⊗ V)ψ_+`.
///
/// The objective is a convex quadratic in the unitary `W = U Vᵀ`; each step
/// replaces `W` by the polar factor of the matrix view of `ρ ω_W`.
pub fn max_entangled_fidelity(rho: &DensityMatrix, cfg: &SeeSawConfig) -> (f64, BipartiteVector) {
    let d = rho.d();
    let scale = 1.0 / (d as f64).sqrt();
    let m = rho.matrix();
    let omega_of = |w: &CMatrix| -> CVector { CVector::from_fn(d * d, |idx, _| w[(idx / d, idx % d)] * scale) };
    let runs: Vec<(f64, CVector)> = crate::ensembles::par_map(cfg.restarts.max(1), |r| {
        let mut w = if r == 0 {
            CMatrix::identity(d, d)
        } else {
            random_unitary(d, &mut cfg.rng.child(r as u32).rng())
        };
        let mut omega = omega_of(&w);
        let mut val = linalg::quadratic_form(m, &omega);
        for _ in 0..cfg.max_iters {
            let y = m * &omega;
            let ym = CMatrix::from_fn(d, d, |i, j| y[i * d + j]);
            w = polar_unitary(&ym);
            let next = omega_of(&w);
            let next_val = linalg::quadratic_form(m, &next);
            let gain = (next_val - val) / next_val.abs().max(f64::MIN_POSITIVE);
            if next_val >= val {
                omega = next;
                val = next_val;
            }
            if gain < cfg.tol {
                break;
            }
        }
        (val, omega)
    });
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 > runs[best].0 {
            best = i;
        }
    }
    let (val, omega) = runs.into_iter().nth(best).expect("nonempty");
    (val, BipartiteVector::from_vector(d, omega).expect("finite"))
}

/// Brackets membership of `ρ` in the k-entangled states.
pub fn schmidt_number_bracket(rho: &DensityMatrix, k: usize, cfg: &BracketConfig) -> Result<MembershipBracket> {
    let d = rho.d();
    check_k(k, d)?;
    let yes = |cert| MembershipBracket { k, decided: Verdict::Yes, lower_cert: Some(cert), upper_cert: None };
    let no = |v| MembershipBracket { k, decided: Verdict::No, lower_cert: None, upper_cert: Some(v) };

    if k == d {
        return Ok(yes(LowerCert::AllStates));
    }
    if rho.purity() > 1.0 - DECISION_TOL {
        let eig = linalg::eigh_sorted(rho.matrix());
        let v = BipartiteVector::from_vector(d, eig.vectors.column(d * d - 1).into_owned())?;
        let rank = schmidt_rank(&v);
        if rank <= k {
            return Ok(yes(LowerCert::PureLowRank { rank, vector: v }));
        }
    }

    if k == 1 {
        let ppt = ppt_test(rho, cfg.ppt_tol);
        if !ppt.ppt {
            // (|x⟩⟨x|)^Γ is decomposable, hence 1-block positive, and
            // tr((|x⟩⟨x|)^Γ ρ) = ⟨x|ρ^Γ|x⟩ = λ_min
            let x = BipartiteVector::from_vector(d, ppt.min_eigenvector)?;
            let w = HermitianOperator::projector(&x).partial_transpose();
            let value = w.hs_inner(rho.as_hermitian());
            return Ok(no(Violation { criterion: "ppt".into(), witness: w, value }));
        }
        if d == 2 {
            return Ok(yes(LowerCert::PptTwoQubit { min_eigenvalue: ppt.min_eigenvalue }));
        }
    }

    let threshold = k as f64 / d as f64;
    let (fid, omega) = max_entangled_fidelity(rho, &cfg.seesaw);
    if fid - threshold > DECISION_TOL {
        // ⟨η|ω⟩² ≤ k/d for rank-≤k unit η, so k/d·I - |ω⟩⟨ω| is k-block positive
        let w = HermitianOperator::identity(d)
            .scaled(threshold)
            .sub(&HermitianOperator::projector(&omega));
        let value = w.hs_inner(rho.as_hermitian());
        return Ok(no(Violation { criterion: "fidelity".into(), witness: w, value }));
    }

    for w in &cfg.witnesses {
        if w.d() != d {
            return Err(Error::Dimension("witness dimension mismatch".into()));
        }
        let value = w.hs_inner(rho.as_hermitian());
        if value < -DECISION_TOL {
            return Ok(no(Violation { criterion: "user_witness".into(), witness: w.clone(), value }));
        }
    }

    Ok(MembershipBracket { k, decided: Verdict::Unknown, lower_cert: None, upper_cert: None })
}

/// Draws a Hermitian `y` with `⟨y, e⟩ = 1`: `y = e + t·D` for a unit
/// traceless direction `D` and `t` uniform in `[0, t_max)`.
pub fn random_normalized_y(d: usize, t_max: f64, seed: SeedSpec) -> Result<HermitianOperator> {
    use rand::Rng;
    let mut rng = seed.rng();
    let dir = crate::ensembles::random_hermitian_direction(d, true, &mut rng)?;
    let t: f64 = rng.random::<f64>() * t_max;
    Ok(HermitianOperator::identity(d).scaled(1.0 / d as f64).add(&dir.scaled(t)))
}
