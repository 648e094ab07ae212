use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::MonteCarloEstimate;
use crate::ensembles::{par_map, SeedSpec};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::seesaw::{support_entk, support_entk_from, SeeSawConfig};
use crate::tensor::{BipartiteVector, HermitianOperator};

/// `γ_n = Γ(n/2) / (√2 Γ((n+1)/2))`, so that half the mean width equals
/// `γ_n` times the Gaussian mean of the support function.
pub fn gamma_n(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Dimension("gamma_n needs n >= 1".into()));
    }
    let h = n as f64 / 2.0;
    Ok((ln_gamma(h) - ln_gamma(h + 0.5)).exp() / std::f64::consts::SQRT_2)
}

/// Support function `h_K(g) = max_{x ∈ K} ⟨x, g⟩` of a body in `R^dim`.
pub trait SupportOracle: Sync {
    fn dim(&self) -> usize;
    fn support(&self, g: &[f64], seed: SeedSpec) -> Result<f64>;
    /// `false` when `support` only returns a lower bound on `h_K`.
    fn exact(&self) -> bool {
        true
    }
    fn describe(&self) -> serde_json::Value;
}

/// The unit Euclidean ball.
pub struct BallSupport {
    pub dim: usize,
}

impl SupportOracle for BallSupport {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, g: &[f64], _: SeedSpec) -> Result<f64> {
        Ok(g.iter().map(|x| x * x).sum::<f64>().sqrt())
    }
    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "body": "ball", "dim": self.dim })
    }
}

/// The segment `[-u, u]`.
pub struct SegmentSupport {
    pub u: Vec<f64>,
}

impl SupportOracle for SegmentSupport {
    fn dim(&self) -> usize {
        self.u.len()
    }
    fn support(&self, g: &[f64], _: SeedSpec) -> Result<f64> {
        Ok(self.u.iter().zip(g).map(|(a, b)| a * b).sum::<f64>().abs())
    }
    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "body": "segment", "dim": self.u.len() })
    }
}

/// The single point `{0}`.
pub struct PointSupport {
    pub dim: usize,
}

impl SupportOracle for PointSupport {
    fn dim(&self) -> usize {
        self.dim
    }
    fn support(&self, _: &[f64], _: SeedSpec) -> Result<f64> {
        Ok(0.0)
    }
    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "body": "point", "dim": self.dim })
    }
}

/// `Ent_k^1` inside the traceless hyperplane centred at `I/d²`, in
/// orthonormal coordinates of dimension `d⁴ - 1`.
pub struct EntkSupport {
    pub d: usize,
    pub k: usize,
    pub cfg: SeeSawConfig,
}

impl SupportOracle for EntkSupport {
    fn dim(&self) -> usize {
        self.d.pow(4) - 1
    }
    fn support(&self, g: &[f64], seed: SeedSpec) -> Result<f64> {
        let a = HermitianOperator::new(self.d, traceless_hermitian(self.d * self.d, g)?)?;
        let cfg = SeeSawConfig { rng: seed, ..self.cfg };
        Ok(support_entk(&a, self.k, &cfg)?.value)
    }
    fn exact(&self) -> bool {
        self.k == self.d
    }
    fn describe(&self) -> serde_json::Value {
        serde_json::json!({ "body": "ent_k", "d": self.d, "k": self.k, "dim": self.dim() })
    }
}

/// Maps coordinates in an orthonormal basis of the traceless Hermitian
/// `n × n` matrices (HS inner product) to the matrix. Off-diagonal pairs
/// `i < j` come first in row-major order, each contributing
/// `(E_ij + E_ji)/√2` and `(-iE_ij + iE_ji)/√2`, followed by the diagonal
/// directions `(Σ_{m<l} E_mm - l E_ll)/√(l(l+1))` for `l = 1..n-1`.
pub fn traceless_hermitian(n: usize, coords: &[f64]) -> Result<CMatrix> {
    if n == 0 || coords.len() + 1 != n * n {
        return Err(Error::Dimension(format!(
            "traceless Hermitian {n}x{n} needs {} coordinates, got {}",
            (n * n).saturating_sub(1),
            coords.len()
        )));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(n, n);
    let mut c = coords.iter();
    for i in 0..n {
        for j in (i + 1)..n {
            let x = *c.next().expect("length checked");
            let y = *c.next().expect("length checked");
            m[(i, j)] = C64::new(x * r, -y * r);
            m[(j, i)] = C64::new(x * r, y * r);
        }
    }
    for l in 1..n {
        let x = *c.next().expect("length checked");
        let s = x / ((l * (l + 1)) as f64).sqrt();
        for mm in 0..l {
            m[(mm, mm)].re += s;
        }
        m[(l, l)].re -= l as f64 * s;
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize)]
pub struct WidthEstimate {
    /// Estimate of the mean width `w(K)`.
    pub width: MonteCarloEstimate,
    /// Set when the support oracle only bounds `h_K` from below, making the
    /// width a lower estimate.
    pub lower_estimate: bool,
}

impl WidthEstimate {
    pub fn half_width(&self) -> f64 {
        self.width.value / 2.0
    }
}

fn gaussian_vector(n: usize, seed: SeedSpec) -> Vec<f64> {
    let mut rng = seed.rng();
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `w(K) ≈ 2 γ_n · mean h_K(g)` over standard Gaussian `g ∈ R^n`.
pub fn mean_width_mc(
    oracle: &dyn SupportOracle,
    n: usize,
    n_samples: usize,
    seed: SeedSpec,
) -> Result<WidthEstimate> {
    if n != oracle.dim() {
        return Err(Error::Dimension(format!("oracle lives in R^{}, not R^{n}", oracle.dim())));
    }
    let scale = 2.0 * gamma_n(n)?;
    let samples = par_map(n_samples, |i| {
        let s = seed.child(i as u32);
        let g = gaussian_vector(n, s);
        oracle.support(&g, s.child(0)).map(|h| scale * h)
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let mut params = oracle.describe();
    params["gamma_n"] = serde_json::json!(scale / 2.0);
    Ok(WidthEstimate {
        width: MonteCarloEstimate::from_samples(&samples, seed, params)?,
        lower_estimate: !oracle.exact(),
    })
}

/// Widths of `Ent_k^1` for every `k` in `ks` from shared Gaussian directions.
/// For each direction the search for `k` is warm-started from the witness
/// found for the previous `k`, so the per-direction estimates are
/// nondecreasing in `k`.
pub fn entk_width_grid(
    d: usize,
    ks: &[usize],
    n_samples: usize,
    cfg: &SeeSawConfig,
    seed: SeedSpec,
) -> Result<Vec<WidthEstimate>> {
    let mut ks: Vec<usize> = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    for &k in &ks {
        crate::error::check_k(k, d)?;
    }
    let n = d.pow(4) - 1;
    let scale = 2.0 * gamma_n(n)?;
    let per_direction = par_map(n_samples, |i| -> Result<Vec<f64>> {
        let s = seed.child(i as u32);
        let g = gaussian_vector(n, s);
        let a = HermitianOperator::new(d, traceless_hermitian(d * d, &g)?)?;
        let mut out = Vec::with_capacity(ks.len());
        let mut prev: Vec<BipartiteVector> = Vec::new();
        for &k in &ks {
            let c = SeeSawConfig { rng: s.child(k as u32), ..*cfg };
            let r = support_entk_from(&a, k, &c, &prev)?;
            out.push(scale * r.value);
            prev = r.witness;
        }
        Ok(out)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    ks.iter()
        .enumerate()
        .map(|(idx, &k)| {
            let samples: Vec<f64> = per_direction.iter().map(|row| row[idx]).collect();
            let params = serde_json::json!({
                "body": "ent_k", "d": d, "k": k, "dim": n, "gamma_n": scale / 2.0,
                "restarts": cfg.restarts, "max_iters": cfg.max_iters, "tol": cfg.tol,
            });
            Ok(WidthEstimate {
                width: MonteCarloEstimate::from_samples(&samples, seed, params)?,
                lower_estimate: k < d,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VradBound {
    pub value: f64,
    pub certified: bool,
    pub note: Option<String>,
}

const UNCERTIFIED: &str = "not-a-certified-upper-bound";

fn check_width(w: f64) -> Result<()> {
    if !w.is_finite() || w < 0.0 {
        return Err(Error::Config(format!("width must be finite and nonnegative, got {w}")));
    }
    Ok(())
}

/// `vrad(K) ≤ w(K)/2`.
pub fn urysohn_upper(width: f64, lower_estimate: bool) -> Result<VradBound> {
    check_width(width)?;
    Ok(VradBound {
        value: width / 2.0,
        certified: !lower_estimate,
        note: lower_estimate.then(|| UNCERTIFIED.to_string()),
    })
}

/// `vrad(K°) ≥ 1 / (2 w(K))`.
pub fn inv_urysohn_lower(width: f64, lower_estimate: bool) -> Result<VradBound> {
    check_width(width)?;
    if width == 0.0 {
        return Err(Error::Degenerate("polar of a zero-width body is unbounded".into()));
    }
    Ok(VradBound {
        value: 0.5 / width,
        certified: !lower_estimate,
        note: lower_estimate.then(|| "width is a lower estimate; bound not certified".to_string()),
    })
}
