use serde::Serialize;

use super::MonteCarloEstimate;
use crate::cone::{schmidt_number_bracket, BracketConfig, Verdict};
use crate::ensembles::{par_map, random_hs_state, SeedSpec};
use crate::error::{check_k, Error, Result};
use crate::tensor::DensityMatrix;

#[derive(Clone, Debug, Serialize)]
pub struct ProbEstimate {
    pub d: usize,
    pub k: usize,
    /// Fraction of samples certified k-entangled.
    pub p_lo: MonteCarloEstimate,
    /// Fraction of samples not refuted.
    pub p_hi: MonteCarloEstimate,
    /// Set when every sample is decided, so `p_lo` and `p_hi` coincide.
    pub exact: bool,
    pub undecided: usize,
}

/// Whether the bracket decides every state for this `(d, k)`.
pub fn bracket_is_complete(d: usize, k: usize) -> bool {
    k == d || (d == 2 && k == 1)
}

/// Probability that a Hilbert-Schmidt random state on `C^d ⊗ C^d` has
/// Schmidt number at most `k`, bracketed by the decision procedure.
///
/// Sample `i` uses `seed.child(i)` regardless of `k`, so runs for different
/// `k` share states and their brackets are nested.
pub fn prob_schmidt_k(
    d: usize,
    k: usize,
    n_samples: usize,
    cfg: &BracketConfig,
    seed: SeedSpec,
) -> Result<ProbEstimate> {
    check_k(k, d)?;
    let verdicts = par_map(n_samples, |i| {
        let s = seed.child(i as u32);
        let rho = random_hs_state(d, &mut s.rng());
        let mut c = cfg.clone();
        c.seesaw.rng = s.child(1);
        schmidt_number_bracket(&rho, k, &c).map(|b| b.decided)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let lo: Vec<f64> = verdicts.iter().map(|v| f64::from(u8::from(*v == Verdict::Yes))).collect();
    let hi: Vec<f64> = verdicts.iter().map(|v| f64::from(u8::from(*v != Verdict::No))).collect();
    let undecided = verdicts.iter().filter(|v| **v == Verdict::Unknown).count();
    let params = |bound: &str| {
        serde_json::json!({
            "d": d, "k": k, "bound": bound, "measure": "hilbert_schmidt",
            "restarts": cfg.seesaw.restarts, "ppt_tol": cfg.ppt_tol,
        })
    };
    Ok(ProbEstimate {
        d,
        k,
        p_lo: MonteCarloEstimate::from_samples(&lo, seed, params("lower"))?,
        p_hi: MonteCarloEstimate::from_samples(&hi, seed, params("upper"))?,
        exact: bracket_is_complete(d, k) && undecided == 0,
        undecided,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VradRatio {
    /// Hit probability, the volume ratio of the inner body.
    pub p: MonteCarloEstimate,
    /// `m = d_total² - 1`, the real dimension of the state space.
    pub m: usize,
    /// `p^{1/m}`.
    pub ratio: f64,
    /// First-order propagation `p^{1/m - 1} · stderr(p) / m`; zero when `p ∈ {0, 1}`.
    pub ratio_stderr: f64,
}

/// Hit-or-miss estimate of `vrad(inner) / vrad(all states)` over
/// Hilbert-Schmidt random states on `C^{d_total}`.
pub fn vrad_ratio_mc<F>(oracle: F, d_total: usize, n_samples: usize, seed: SeedSpec) -> Result<VradRatio>
where
    F: Fn(&DensityMatrix, SeedSpec) -> Result<Verdict> + Sync,
{
    let side = (d_total as f64).sqrt().round() as usize;
    if side * side != d_total || side == 0 {
        return Err(Error::Dimension(format!("{d_total} is not a square dimension")));
    }
    let hits = par_map(n_samples, |i| {
        let s = seed.child(i as u32);
        let rho = random_hs_state(side, &mut s.rng());
        oracle(&rho, s.child(1))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let undecided = hits.iter().filter(|v| **v == Verdict::Unknown).count();
    if undecided > 0 {
        return Err(Error::Undecided(undecided));
    }
    let samples: Vec<f64> = hits.iter().map(|v| f64::from(u8::from(*v == Verdict::Yes))).collect();
    let p = MonteCarloEstimate::from_samples(&samples, seed, serde_json::json!({ "d_total": d_total }))?;
    let m = d_total * d_total - 1;
    let inv = 1.0 / m as f64;
    let ratio = p.value.powf(inv);
    let ratio_stderr = if p.value > 0.0 && p.value < 1.0 {
        inv * p.value.powf(inv - 1.0) * p.stderr
    } else {
        0.0
    };
    Ok(VradRatio { p, m, ratio, ratio_stderr })
}
