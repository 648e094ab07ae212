//! See-saw (alternating) optimization over Schmidt-rank-restricted unit
//! vectors.
//!
//! Every routine returns a value that is attained by the returned witness,
//! so it is a certified one-sided bound: a lower bound for maxima, an upper
//! bound for minima. Restarts are independent, each owning an RNG stream
//! derived from the config seed, and the winner is selected by
//! `(value, restart index)`.

use serde::{Deserialize, Serialize};

use crate::ensembles::{par_map, random_haar_vector, random_k_entangled, SeedSpec};
use crate::error::{check_k, Error, Result};
use crate::linalg::{eigh_sorted, svd_sorted, CMatrix, CVector, C64};
use crate::tensor::{
    polarization_split, schmidt_rank, truncate_matrix, BipartiteVector, HermitianOperator, Operator,
};
use crate::volumetry::MonteCarloEstimate;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeeSawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the relative improvement of one sweep drops below `tol`.
    pub tol: f64,
    pub rng: SeedSpec,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iters: 500, tol: 1e-10, rng: SeedSpec::new(0, 0) }
    }
}

impl SeeSawConfig {
    pub fn with_seed(seed: SeedSpec) -> Self {
        Self { rng: seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Max,
    Min,
    MaxAbs,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtremalResult {
    pub value: f64,
    pub witness: Vec<BipartiteVector>,
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Objective after each sweep of the winning restart.
    #[serde(skip)]
    pub history: Vec<f64>,
}

struct Run {
    value: f64,
    witness: Vec<CVector>,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

fn mat_of(v: &CVector, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

fn vec_of(m: &CMatrix) -> CVector {
    let d = m.nrows();
    CVector::from_fn(d * d, |idx, _| m[(idx / d, idx % d)])
}

/// Normalized best rank-`k` approximation of `v`, or `None` if `v` vanishes.
fn project_rank_k(v: &CVector, d: usize, k: usize) -> Option<(CVector, f64)> {
    let (t, norm) = truncate_matrix(&mat_of(v, d), k);
    if norm > 0.0 && norm.is_finite() {
        Some((vec_of(&t).unscale(norm), norm))
    } else {
        None
    }
}

fn rel_gain(new: f64, old: f64) -> f64 {
    (new - old) / new.abs().max(f64::MIN_POSITIVE)
}

fn pick_best(runs: Vec<Run>) -> (usize, Run) {
    // strict > keeps the lowest restart index on ties
    let mut best: Option<(usize, Run)> = None;
    for (i, r) in runs.into_iter().enumerate() {
        match &best {
            Some((_, b)) if r.value.partial_cmp(&b.value) != Some(std::cmp::Ordering::Greater) => {}
            _ => best = Some((i, r)),
        }
    }
    best.expect("at least one restart")
}

fn to_vectors(d: usize, w: Vec<CVector>) -> Vec<BipartiteVector> {
    w.into_iter()
        .map(|v| BipartiteVector::from_vector(d, v).expect("finite iterate"))
        .collect()
}

/// Lower bound on `‖A‖_{S(k)} = max |⟨φ|A|ψ⟩|` over Schmidt-rank-≤k unit
/// `φ`, `ψ`, with the attaining pair as witness.
///
/// Each half-step is solved exactly: for fixed `ψ`, the best `φ` is the
/// normalized rank-`k` truncation of `Aψ`, and symmetrically with `A†`.
/// After either half-step `⟨φ|A|ψ⟩` is real and nonnegative.
pub fn sk_norm(op: &Operator, k: usize, cfg: &SeeSawConfig) -> Result<ExtremalResult> {
    let d = op.d();
    check_k(k, d)?;
    cfg.validate()?;
    let a = op.matrix();
    let a_adj = a.adjoint();

    let warm = {
        let svd = svd_sorted(a);
        let v1 = svd.v.column(0).into_owned();
        project_rank_k(&v1, d, k).map(|(v, _)| v)
    };

    let runs = par_map(cfg.restarts, |r| {
        let start = match (r, &warm) {
            (0, Some(w)) => w.clone(),
            _ => {
                let mut rng = cfg.rng.child(r as u32).rng();
                random_k_entangled(d, k, &mut rng).expect("k checked").into_amps()
            }
        };
        let mut psi = start;
        let mut phi = psi.clone();
        let mut history = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        let mut converged = false;
        let mut iterations = 0;
        while iterations < cfg.max_iters {
            iterations += 1;
            let Some((p, _)) = project_rank_k(&(a * &psi), d, k) else {
                // Aψ = 0 for every reachable ψ: the norm is 0 on this orbit
                converged = true;
                history.push(0.0);
                break;
            };
            phi = p;
            let Some((q, val)) = project_rank_k(&(&a_adj * &phi), d, k) else {
                converged = true;
                history.push(0.0);
                break;
            };
            psi = q;
            history.push(val);
            if rel_gain(val, prev) < cfg.tol {
                converged = true;
                break;
            }
            prev = val;
        }
        let value = phi.dotc(&(a * &psi)).norm();
        Run { value, witness: vec![phi, psi], iterations, converged, history }
    });

    let (_, best) = pick_best(runs);
    Ok(ExtremalResult {
        value: best.value,
        witness: to_vectors(d, best.witness),
        iterations: best.iterations,
        restarts_used: cfg.restarts,
        converged: best.converged,
        history: best.history,
    })
}

/// Maximizes `⟨η|M|η⟩` by truncated power iteration on the PSD shift `M + σI`.
fn maximize_quadratic(
    d: usize,
    m: &CMatrix,
    k: usize,
    cfg: &SeeSawConfig,
    extra_starts: &[CVector],
) -> Vec<Run> {
    let n = d * d;
    let eig = eigh_sorted(m);
    // smallest shift making the iteration operator PSD
    let sigma = (-eig.values[0]).max(0.0);
    let shifted = m + CMatrix::identity(n, n) * C64::new(sigma, 0.0);

    let mut starts: Vec<Option<CVector>> = Vec::with_capacity(cfg.restarts + extra_starts.len());
    let lead = eig.vectors.column(n - 1).into_owned();
    starts.push(project_rank_k(&lead, d, k).map(|(v, _)| v));
    for s in extra_starts {
        starts.push(project_rank_k(s, d, k).map(|(v, _)| v));
    }
    let fixed = starts.len();
    starts.extend((1..cfg.restarts).map(|_| None));

    par_map(starts.len(), |idx| {
        let start = match &starts[idx] {
            Some(v) => v.clone(),
            None => {
                // random restarts are numbered 1.. regardless of warm starts
                let r = if idx < fixed { 0 } else { idx - fixed + 1 };
                let mut rng = cfg.rng.child(r as u32).rng();
                if idx < fixed {
                    random_haar_vector(n, &mut rng)
                } else {
                    random_k_entangled(d, k, &mut rng).expect("k checked").into_amps()
                }
            }
        };
        let mut eta = start;
        let mut best_val = eta.dotc(&(m * &eta)).re;
        let mut best = eta.clone();
        let mut history = vec![best_val];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < cfg.max_iters {
            iterations += 1;
            let Some((next, _)) = project_rank_k(&(&shifted * &eta), d, k) else {
                converged = true;
                break;
            };
            eta = next;
            let val = eta.dotc(&(m * &eta)).re;
            history.push(val);
            let gain = rel_gain(val, best_val);
            if val > best_val {
                best_val = val;
                best = eta.clone();
            }
            if gain < cfg.tol {
                converged = true;
                break;
            }
        }
        Run { value: best_val, witness: vec![best], iterations, converged, history }
    })
}

/// Extremum of `⟨η|A|η⟩` over Schmidt-rank-≤k unit `η`.
pub fn quadratic_extremum_k(
    op: &HermitianOperator,
    k: usize,
    sense: Sense,
    cfg: &SeeSawConfig,
) -> Result<ExtremalResult> {
    quadratic_extremum_k_from(op, k, sense, cfg, &[])
}

/// As [`quadratic_extremum_k`], with additional warm starts. Since every
/// restart is monotone, the result is never worse than the best start.
pub fn quadratic_extremum_k_from(
    op: &HermitianOperator,
    k: usize,
    sense: Sense,
    cfg: &SeeSawConfig,
    starts: &[BipartiteVector],
) -> Result<ExtremalResult> {
    let d = op.d();
    check_k(k, d)?;
    cfg.validate()?;
    for s in starts {
        if s.d() != d {
            return Err(Error::Dimension("warm start has the wrong local dimension".into()));
        }
    }
    let extra: Vec<CVector> = starts.iter().map(|s| s.amps().clone()).collect();
    let a = op.matrix();
    let run_sense = |negate: bool| -> ExtremalResult {
        let m = if negate { -a } else { a.clone() };
        let runs = maximize_quadratic(d, &m, k, cfg, &extra);
        let restarts_used = runs.len();
        let (_, best) = pick_best(runs);
        let witness = to_vectors(d, best.witness);
        let value = op.expectation(&witness[0]);
        let history = if negate { best.history.iter().map(|x| -x).collect() } else { best.history };
        ExtremalResult {
            value,
            witness,
            iterations: best.iterations,
            restarts_used,
            converged: best.converged,
            history,
        }
    };
    Ok(match sense {
        Sense::Max => run_sense(false),
        Sense::Min => run_sense(true),
        Sense::MaxAbs => {
            let hi = run_sense(false);
            let lo = run_sense(true);
            if lo.value.abs() > hi.value.abs() {
                ExtremalResult { value: lo.value.abs(), ..lo }
            } else {
                ExtremalResult { value: hi.value.abs(), ..hi }
            }
        }
    })
}

/// Support function of the k-entangled states at `A`:
/// `max_{ρ ∈ Ent_k^1} tr(Aρ)`, attained on a pure state.
pub fn support_entk(op: &HermitianOperator, k: usize, cfg: &SeeSawConfig) -> Result<ExtremalResult> {
    quadratic_extremum_k(op, k, Sense::Max, cfg)
}

pub fn support_entk_from(
    op: &HermitianOperator,
    k: usize,
    cfg: &SeeSawConfig,
    starts: &[BipartiteVector],
) -> Result<ExtremalResult> {
    quadratic_extremum_k_from(op, k, Sense::Max, cfg, starts)
}

/// Turns a rank-≤k pair `(φ, ψ)` into a single rank-≤2k unit vector `η̂` with
/// `|⟨η̂|A|η̂⟩| ≥ Re⟨φ|A|ψ⟩`, by polarization: the two halves `(φ ± ψ)/2`
/// have squared norms summing to one.
pub fn polarized_2k_witness(
    op: &HermitianOperator,
    phi: &BipartiteVector,
    psi: &BipartiteVector,
    k: usize,
) -> Result<ExtremalResult> {
    let d = op.d();
    check_k(k, d)?;
    if phi.d() != d || psi.d() != d {
        return Err(Error::Dimension("witness pair does not match the operator".into()));
    }
    for v in [phi, psi] {
        let r = schmidt_rank(v);
        if r > k {
            return Err(Error::Config(format!("witness has Schmidt rank {r} > k = {k}")));
        }
    }
    let (eta1, eta2) = polarization_split(phi, psi)?;
    let score = |eta: &BipartiteVector| -> Option<(f64, BipartiteVector)> {
        if eta.norm() == 0.0 {
            return None;
        }
        let unit = eta.normalized().ok()?;
        Some((op.expectation(&unit).abs(), unit))
    };
    let best = match (score(&eta1), score(&eta2)) {
        (Some(a), Some(b)) => {
            if b.0 > a.0 {
                b
            } else {
                a
            }
        }
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::Degenerate("both polarization halves vanish".into())),
    };
    Ok(ExtremalResult {
        value: best.0,
        witness: vec![best.1],
        iterations: 0,
        restarts_used: 0,
        converged: true,
        history: vec![best.0],
    })
}

/// Monte Carlo mean of `|A(u ⊗ v)|²` over independent Haar `u`, `v`; the
/// exact value is `‖A‖²_HS / d²`.
pub fn product_average_check(
    op: &Operator,
    n_samples: usize,
    seed: SeedSpec,
) -> Result<MonteCarloEstimate> {
    let d = op.d();
    let a = op.matrix();
    let samples = par_map(n_samples, |i| {
        let mut rng = seed.child(i as u32).rng();
        let u = random_haar_vector(d, &mut rng);
        let v = random_haar_vector(d, &mut rng);
        let x = BipartiteVector::product(&u, &v).expect("same length");
        (a * x.amps()).norm_squared()
    });
    MonteCarloEstimate::from_samples(
        &samples,
        seed,
        serde_json::json!({ "d": d, "hs_norm": op.hs_norm() }),
    )
}
