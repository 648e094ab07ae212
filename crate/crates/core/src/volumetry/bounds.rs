use serde::{Deserialize, Serialize};

use crate::error::{check_k, Result};

/// Constants of the asymptotic bounds. Their true values are unknown; the
/// defaults are placeholders for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstants {
    /// Upper constant for the volume radius of `Ent_k^1`.
    pub c0_upper: f64,
    /// Lower constant for the volume radius of `Ent_k^1`.
    pub c0_lower: f64,
    /// Upper constant for the probability bound.
    pub c_upper: f64,
    /// Lower constant for the probability bound.
    pub c_lower: f64,
}

impl Default for EnvelopeConstants {
    fn default() -> Self {
        Self { c0_upper: 1.0, c0_lower: 0.1, c_upper: 1.0, c_lower: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    VradEntk,
    WidthEntk,
    ProbSchmidtK,
    RatioSuccessive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEnvelope {
    pub d: usize,
    pub k: usize,
    pub lower: f64,
    pub upper: f64,
    pub kind: EnvelopeKind,
    pub note: Option<String>,
}

/// Numeric envelopes for `(d, k)`:
///
/// * `vrad_entk`: lower `⌊k/2⌋^{1/2} / (2 d^{3/2})`, upper `C₀ k^{1/2} / d^{3/2}`.
/// * `width_entk`: `2 c₀ k^{1/2} / d^{3/2}` and `2 C₀ k^{1/2} / d^{3/2}`.
/// * `prob_schmidt_k`: `(c k/d)^{(d²-1)/2}` and `(C k/d)^{(d²-1)/2}` capped at 1.
/// * `ratio_successive`: the heuristic `(1 + 1/k)^{(d²-1)/2}` for `P(k+1)/P(k)`.
pub fn bound_envelopes(d: usize, k: usize, c: &EnvelopeConstants) -> Result<Vec<BoundEnvelope>> {
    check_k(k, d)?;
    let df = d as f64;
    let kf = k as f64;
    let scale = df.powf(1.5);
    let half = (k / 2) as f64;
    let vacuous = (k == 1).then(|| "k = 1 lower bound is vacuous; reported as 0".to_string());
    let vrad_lower = 0.5 * half.sqrt() / scale;
    let vrad_upper = c.c0_upper * kf.sqrt() / scale;
    let expo = (df * df - 1.0) / 2.0;
    let prob = |cc: f64| (cc * kf / df).powf(expo).min(1.0);

    let mut out = vec![
        BoundEnvelope { d, k, lower: vrad_lower, upper: vrad_upper, kind: EnvelopeKind::VradEntk, note: vacuous },
        BoundEnvelope {
            d,
            k,
            lower: 2.0 * c.c0_lower * kf.sqrt() / scale,
            upper: 2.0 * c.c0_upper * kf.sqrt() / scale,
            kind: EnvelopeKind::WidthEntk,
            note: None,
        },
        BoundEnvelope {
            d,
            k,
            lower: prob(c.c_lower),
            upper: prob(c.c_upper),
            kind: EnvelopeKind::ProbSchmidtK,
            note: None,
        },
    ];
    if k < d {
        let r = (1.0 + 1.0 / kf).powf(expo);
        out.push(BoundEnvelope {
            d,
            k,
            lower: r,
            upper: r,
            kind: EnvelopeKind::RatioSuccessive,
            note: Some("heuristic P(k+1)/P(k)".into()),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn get(v: &[BoundEnvelope], kind: EnvelopeKind) -> &BoundEnvelope {
        v.iter().find(|e| e.kind == kind).unwrap()
    }

    #[test]
    fn lower_volume_radius() {
        let v = bound_envelopes(3, 2, &EnvelopeConstants::default()).unwrap();
        let e = get(&v, EnvelopeKind::VradEntk);
        assert!((e.lower - 0.5 / 27f64.sqrt()).abs() < 1e-15);
        assert!(e.lower <= e.upper);
    }

    #[test]
    fn successive_ratio() {
        let v = bound_envelopes(3, 1, &EnvelopeConstants::default()).unwrap();
        assert_eq!(get(&v, EnvelopeKind::RatioSuccessive).upper, 16.0);
        let e = get(&v, EnvelopeKind::VradEntk);
        assert_eq!(e.lower, 0.0);
        assert!(e.note.is_some());
    }

    #[test]
    fn full_rank_upper() {
        let c = EnvelopeConstants::default();
        for d in 2..7 {
            let v = bound_envelopes(d, d, &c).unwrap();
            assert!((get(&v, EnvelopeKind::VradEntk).upper - c.c0_upper / d as f64).abs() < 1e-15);
            assert!(v.iter().all(|e| e.kind != EnvelopeKind::RatioSuccessive));
        }
    }

    #[test]
    fn ordered_for_k_at_least_two() {
        let c = EnvelopeConstants::default();
        for d in 2..9 {
            for k in 2..=d {
                for e in bound_envelopes(d, k, &c).unwrap() {
                    assert!(e.lower <= e.upper, "{e:?}");
                }
            }
        }
    }
}
