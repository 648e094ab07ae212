use serde_json::json;

use super::config::{Command, ExperimentConfig, MapKind};
use super::manifest::{Failure, ResultRow, VerifySummary};
use super::verify::run_verify;
use crate::cone::{base_dual_test, k_block_positivity, ppt_test, random_normalized_y, BracketConfig, QuantumMap};
use crate::ensembles::{par_map, random_haar_bipartite, random_hermitian_direction, random_hs_state, SeedSpec};
use crate::error::{Error, Result};
use crate::io::ArrayFile;
use crate::seesaw::{sk_norm, SeeSawConfig};
use crate::tensor::{k_norm, schmidt_coefficients};
use crate::volumetry::{
    bound_envelopes, entk_width_grid, inv_urysohn_lower, prob_schmidt_k, santalo_check, urysohn_upper, Body,
    MonteCarloEstimate,
};

/// Seed namespace of dimension `d`, shared by every `k` so that runs over `k`
/// see the same random inputs.
pub(crate) fn cell_seed(cfg: &ExperimentConfig, d: usize) -> SeedSpec {
    SeedSpec::new(cfg.seed, 0).child(d as u32)
}

pub(crate) fn seesaw_config(cfg: &ExperimentConfig, rng: SeedSpec) -> SeeSawConfig {
    SeeSawConfig { restarts: cfg.restarts, max_iters: cfg.max_iters, tol: cfg.tol, rng }
}

fn row(cfg: &ExperimentConfig, d: usize, k: usize, value: f64, stderr: f64, n: usize, extra: serde_json::Value) -> ResultRow {
    ResultRow { command: cfg.command.name().to_string(), d, k, value, stderr, n, seed: cfg.seed, extra }
}

fn mc_row(cfg: &ExperimentConfig, d: usize, k: usize, e: &MonteCarloEstimate, mut extra: serde_json::Value) -> ResultRow {
    extra["seed_spec"] = json!(e.seed);
    row(cfg, d, k, e.value, e.stderr, e.n, extra)
}

fn min_of(xs: &[f64]) -> f64 {
    xs.iter().copied().fold(f64::INFINITY, f64::min)
}

fn read_input(cfg: &ExperimentConfig) -> Result<Option<ArrayFile>> {
    cfg.input.as_deref().map(ArrayFile::read).transpose()
}

fn ks_or_err(cfg: &ExperimentConfig, d: usize) -> Result<Vec<usize>> {
    let ks = cfg.ks(d);
    if ks.is_empty() {
        return Err(Error::Config(format!("no k in the requested range fits d = {d}")));
    }
    Ok(ks)
}

/// Runs one command, returning its rows and, for `verify`, the pass/fail summary.
pub fn run_command(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, Option<VerifySummary>)> {
    let rows = match cfg.command {
        Command::Knorm => knorm(cfg)?,
        Command::Sknorm => sknorm(cfg)?,
        Command::Blockpos => blockpos(cfg)?,
        Command::Dual => dual(cfg)?,
        Command::Ppt => ppt(cfg)?,
        Command::Prob => prob(cfg)?,
        Command::Width => width(cfg)?,
        Command::Bounds => bounds(cfg)?,
        Command::Santalo => {
            let rows = santalo(cfg)?;
            let failures: Vec<Failure> = rows
                .iter()
                .filter(|r| r.extra["satisfies_upper"] != json!(true))
                .map(|r| Failure {
                    check: "santalo_upper".into(),
                    d: r.d,
                    k: 0,
                    seed: SeedSpec::new(cfg.seed, 0),
                    detail: format!("product {} > 1", r.value),
                })
                .collect();
            let summary = VerifySummary { suite: "santalo".into(), passed: failures.is_empty(), checks: rows.len(), failures };
            return Ok((rows, Some(summary)));
        }
        Command::Verify => {
            let (rows, summary) = run_verify(cfg)?;
            return Ok((rows, Some(summary)));
        }
    };
    Ok((rows, None))
}

fn knorm(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    if let Some(file) = read_input(cfg)? {
        let xi = file.to_vector()?;
        let d = xi.d();
        for k in ks_or_err(cfg, d)? {
            let v = k_norm(&xi, k)?;
            let extra = json!({ "source": "input", "schmidt": schmidt_coefficients(&xi), "sqrt_k_over_d": (k as f64 / d as f64).sqrt() });
            rows.push(row(cfg, d, k, v, 0.0, 1, extra));
        }
        return Ok(rows);
    }
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let vectors = par_map(cfg.samples, |i| random_haar_bipartite(d, &mut seed.child(i as u32).rng()));
        for k in ks_or_err(cfg, d)? {
            let vals = vectors.iter().map(|x| k_norm(x, k)).collect::<Result<Vec<f64>>>()?;
            let bound = (k as f64 / d as f64).sqrt();
            let e = MonteCarloEstimate::from_samples(&vals, seed, json!({}))?;
            let extra = json!({
                "min": min_of(&vals),
                "sqrt_k_over_d": bound,
                "violations": vals.iter().filter(|&&v| v < bound - 1e-12).count(),
            });
            rows.push(mc_row(cfg, d, k, &e, extra));
        }
    }
    Ok(rows)
}

fn sknorm(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    if let Some(file) = read_input(cfg)? {
        let op = file.to_operator()?;
        let d = op.d();
        for k in ks_or_err(cfg, d)? {
            let r = sk_norm(&op, k, &seesaw_config(cfg, SeedSpec::new(cfg.seed, 0)))?;
            let extra = json!({ "source": "input", "iterations": r.iterations, "converged": r.converged });
            rows.push(row(cfg, d, k, r.value, 0.0, 1, extra));
        }
        return Ok(rows);
    }
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let ops = par_map(cfg.samples, |i| random_hermitian_direction(d, false, &mut seed.child(i as u32).rng()))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for k in ks_or_err(cfg, d)? {
            let vals = ops
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let rng = seed.child(i as u32).child(k as u32);
                    sk_norm(a, k, &seesaw_config(cfg, rng)).map(|r| r.value)
                })
                .collect::<Result<Vec<f64>>>()?;
            let bound = (k as f64).sqrt() / (d as f64).powf(1.5);
            let e = MonteCarloEstimate::from_samples(&vals, seed, json!({}))?;
            let above = vals.iter().filter(|&&v| v >= bound - 1e-6).count();
            let extra = json!({
                "min": min_of(&vals),
                "bound": bound,
                "fraction_above_bound": above as f64 / vals.len() as f64,
                "restarts": cfg.restarts,
            });
            rows.push(mc_row(cfg, d, k, &e, extra));
        }
    }
    Ok(rows)
}

fn blockpos(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let maps: Vec<(String, QuantumMap)> = match read_input(cfg)? {
        Some(file) => vec![("input".into(), QuantumMap::from_choi(file.to_hermitian()?))],
        None => cfg
            .d
            .iter()
            .map(|&d| {
                let m = match cfg.map {
                    MapKind::Transpose => QuantumMap::transpose(d),
                    MapKind::Identity => QuantumMap::identity(d),
                    MapKind::Depolarizing => QuantumMap::depolarizing(d),
                };
                (serde_json::to_value(cfg.map).expect("enum").as_str().unwrap_or("").to_string(), m)
            })
            .collect(),
    };
    let mut rows = Vec::new();
    for (name, m) in &maps {
        for k in ks_or_err(cfg, m.d)? {
            let c = k_block_positivity(m, k, &seesaw_config(cfg, SeedSpec::new(cfg.seed, 0).child(k as u32)))?;
            let extra = json!({
                "map": name,
                "status": c.status,
                "exact": c.exact,
                "trace_preserving": m.tp,
                "unital": m.unital,
            });
            rows.push(row(cfg, m.d, k, c.min_estimate, 0.0, c.search.restarts_used, extra));
        }
    }
    Ok(rows)
}

fn dual(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    if let Some(file) = read_input(cfg)? {
        let y = file.to_hermitian()?;
        let d = y.d();
        for k in ks_or_err(cfg, d)? {
            let c = base_dual_test(&y, k, &seesaw_config(cfg, SeedSpec::new(cfg.seed, 0)))?;
            let extra = json!({
                "source": "input",
                "member_bases": c.member_bases,
                "member_direct": c.member_direct,
                "routes_agree": c.routes_agree,
                "slack_bases": c.slack_bases,
                "identity_defect": c.identity_defect,
            });
            rows.push(row(cfg, d, k, c.slack_direct, 0.0, 1, extra));
        }
        return Ok(rows);
    }
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        for k in ks_or_err(cfg, d)? {
            let certs = par_map(cfg.samples, |i| {
                let s = seed.child(i as u32);
                let y = random_normalized_y(d, cfg.t_max, s)?;
                base_dual_test(&y, k, &seesaw_config(cfg, s.child(k as u32)))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let member: Vec<f64> = certs.iter().map(|c| f64::from(u8::from(c.member_direct))).collect();
            let e = MonteCarloEstimate::from_samples(&member, seed, json!({}))?;
            let extra = json!({
                "agreements": certs.iter().filter(|c| c.routes_agree).count(),
                "max_identity_defect": certs.iter().map(|c| c.identity_defect).fold(0.0, f64::max),
                "t_max": cfg.t_max,
            });
            rows.push(mc_row(cfg, d, k, &e, extra));
        }
    }
    Ok(rows)
}

fn ppt(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if let Some(file) = read_input(cfg)? {
        let rho = file.to_state()?;
        let r = ppt_test(&rho, cfg.ppt_tol);
        let extra = json!({ "source": "input", "ppt": r.ppt });
        return Ok(vec![row(cfg, rho.d(), 1, r.min_eigenvalue, 0.0, 1, extra)]);
    }
    let mut rows = Vec::new();
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let mins = par_map(cfg.samples, |i| {
            ppt_test(&random_hs_state(d, &mut seed.child(i as u32).rng()), cfg.ppt_tol).min_eigenvalue
        });
        let hits: Vec<f64> = mins.iter().map(|&m| f64::from(u8::from(m >= -cfg.ppt_tol))).collect();
        let e = MonteCarloEstimate::from_samples(&hits, seed, json!({}))?;
        let extra = json!({ "quantity": "ppt_fraction", "min_eigenvalue_min": min_of(&mins) });
        rows.push(mc_row(cfg, d, 1, &e, extra));
    }
    Ok(rows)
}

pub(crate) fn bracket_config(cfg: &ExperimentConfig) -> BracketConfig {
    BracketConfig { seesaw: seesaw_config(cfg, SeedSpec::new(cfg.seed, 0)), ppt_tol: cfg.ppt_tol, witnesses: Vec::new() }
}

fn prob(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let bc = bracket_config(cfg);
    let mut rows = Vec::new();
    for &d in &cfg.d {
        for k in ks_or_err(cfg, d)? {
            let p = prob_schmidt_k(d, k, cfg.samples, &bc, cell_seed(cfg, d))?;
            let extra = json!({
                "p_hi": p.p_hi.value,
                "p_hi_stderr": p.p_hi.stderr,
                "exact": p.exact,
                "undecided": p.undecided,
            });
            rows.push(mc_row(cfg, d, k, &p.p_lo, extra));
        }
    }
    Ok(rows)
}

fn width(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &cfg.d {
        let ks = ks_or_err(cfg, d)?;
        let grid = entk_width_grid(d, &ks, cfg.samples, &seesaw_config(cfg, SeedSpec::new(cfg.seed, 0)), cell_seed(cfg, d))?;
        for (k, w) in ks.iter().zip(&grid) {
            let scale = (*k as f64).sqrt() / (d as f64).powf(1.5);
            let extra = json!({
                "half_width": w.half_width(),
                "ratio_to_scaling": w.half_width() / scale,
                "lower_estimate": w.lower_estimate,
                "urysohn_upper": urysohn_upper(w.width.value, w.lower_estimate)?,
                "inv_urysohn_lower": inv_urysohn_lower(w.width.value, w.lower_estimate)?,
            });
            rows.push(mc_row(cfg, d, *k, &w.width, extra));
        }
    }
    Ok(rows)
}

fn bounds(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &cfg.d {
        for k in ks_or_err(cfg, d)? {
            for e in bound_envelopes(d, k, &cfg.constants)? {
                let extra = json!({ "kind": e.kind, "lower": e.lower, "upper": e.upper, "note": e.note });
                rows.push(row(cfg, d, k, e.upper, 0.0, 0, extra));
            }
        }
    }
    Ok(rows)
}

fn santalo(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &m in &cfg.m {
        for body in [Body::Ball, Body::Cube, Body::CrossPolytope] {
            let r = santalo_check(body, m, cfg.santalo_c)?;
            let extra = json!({
                "body": r.body,
                "polar": r.polar,
                "satisfies_upper": r.satisfies_upper,
                "c": r.c,
                "satisfies_lower_at_c": r.satisfies_lower_at_c,
            });
            rows.push(row(cfg, m, 0, r.product, 0.0, 0, extra));
        }
    }
    Ok(rows)
}
