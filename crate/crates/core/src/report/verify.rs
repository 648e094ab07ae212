//! Invariant suites run over seeded grids. Every failing instance is
//! recorded with its `(d, k, seed)`.

use serde_json::json;

use super::commands::{bracket_config, cell_seed, seesaw_config};
use super::config::{ExperimentConfig, Suite};
use super::manifest::{Failure, ResultRow, VerifySummary};
use crate::cone::random_normalized_y;
use crate::cone::base_dual_test;
use crate::ensembles::{par_map, random_haar_bipartite, random_hermitian_direction, random_unitary, SeedSpec};
use crate::error::{Error, Result};
use crate::linalg::kron;
use crate::seesaw::{polarized_2k_witness, quadratic_extremum_k_from, sk_norm, SeeSawConfig, Sense};
use crate::tensor::{k_norm, schmidt_decompose, BipartiteVector};
use crate::volumetry::{entk_width_grid, gamma_n, mean_width_mc, prob_schmidt_k, BallSupport};

const TOL: f64 = 1e-12;

struct Tally {
    suite: Suite,
    rows: Vec<ResultRow>,
    failures: Vec<Failure>,
    checks: usize,
    seed: u64,
}

impl Tally {
    fn new(suite: Suite, seed: u64) -> Self {
        Self { suite, rows: Vec::new(), failures: Vec::new(), checks: 0, seed }
    }

    fn check(&mut self, ok: bool, check: &str, d: usize, k: usize, seed: SeedSpec, detail: impl FnOnce() -> String) -> bool {
        self.checks += 1;
        if !ok {
            self.failures.push(Failure { check: check.into(), d, k, seed, detail: detail() });
        }
        ok
    }

    fn row(&mut self, d: usize, k: usize, value: f64, n: usize, extra: serde_json::Value) {
        self.rows.push(ResultRow { command: "verify".into(), d, k, value, stderr: 0.0, n, seed: self.seed, extra });
    }

    fn finish(self) -> (Vec<ResultRow>, VerifySummary) {
        let name = serde_json::to_value(self.suite).expect("enum").as_str().unwrap_or_default().to_string();
        let summary = VerifySummary { suite: name, passed: self.failures.is_empty(), checks: self.checks, failures: self.failures };
        (self.rows, summary)
    }
}

pub fn run_verify(cfg: &ExperimentConfig) -> Result<(Vec<ResultRow>, VerifySummary)> {
    let suite = cfg.suite.ok_or_else(|| Error::Config("verify needs a suite".into()))?;
    let mut t = Tally::new(suite, cfg.seed);
    match suite {
        Suite::Norms => norms(cfg, &mut t)?,
        Suite::Chain => chain(cfg, &mut t)?,
        Suite::Duality => duality(cfg, &mut t)?,
        Suite::Width => width(cfg, &mut t)?,
        Suite::Prob => prob(cfg, &mut t)?,
    }
    Ok(t.finish())
}

/// `(U ⊗ V) ψ` for the flat vector with `r` equal Schmidt coefficients.
fn flat_vector(d: usize, r: usize, seed: SeedSpec) -> Result<BipartiteVector> {
    let mut rng = seed.rng();
    let u = random_unitary(d, &mut rng);
    let v = random_unitary(d, &mut rng);
    let mut amps = crate::linalg::CVector::zeros(d * d);
    for j in 0..r {
        amps[j * d + j] = crate::linalg::C64::new(1.0 / (r as f64).sqrt(), 0.0);
    }
    BipartiteVector::from_vector(d, kron(&u, &v) * amps)
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

fn norms(cfg: &ExperimentConfig, t: &mut Tally) -> Result<()> {
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let vectors = par_map(cfg.samples, |i| random_haar_bipartite(d, &mut seed.child(i as u32).rng()));
        let norms = vectors
            .iter()
            .map(|x| (1..=d).map(|k| k_norm(x, k)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        let decomps = vectors.iter().take(cfg.samples.min(10)).map(schmidt_decompose).collect::<Result<Vec<_>>>()?;
        for k in cfg.ks(d) {
            let before = t.failures.len();
            let bound = (k as f64 / d as f64).sqrt();
            for (i, ns) in norms.iter().enumerate() {
                let s = seed.child(i as u32);
                t.check(ns[k - 1] >= bound - TOL, "k_norm_lower_bound", d, k, s, || format!("{} < {bound}", ns[k - 1]));
                if k < d {
                    t.check(ns[k - 1] <= ns[k] + TOL, "k_norm_monotone", d, k, s, || format!("{} > {}", ns[k - 1], ns[k]));
                }
            }
            let flat_seed = seed.child(u32::MAX);
            let flat = k_norm(&flat_vector(d, d, flat_seed)?, k)?;
            t.check((flat - bound).abs() <= 1e-10, "flat_equality", d, k, flat_seed, || format!("{flat} vs {bound}"));

            let lambdas = subsets(d, k);
            let frac = k as f64 / d as f64;
            for (i, dec) in decomps.iter().enumerate() {
                let xi = dec.reconstruct();
                let (mut overlap, mut weight) = (0.0, 0.0);
                for l in &lambdas {
                    let part = dec.partial_sum(l.iter().copied());
                    overlap += xi.inner(&part).re;
                    weight += part.norm().powi(2);
                }
                let n = lambdas.len() as f64;
                let target = frac * xi.norm().powi(2);
                let s = seed.child(i as u32);
                t.check((overlap / n - target).abs() <= 1e-10, "subset_overlap", d, k, s, || format!("{}", overlap / n));
                t.check((weight / n - target).abs() <= 1e-10, "subset_weight", d, k, s, || format!("{}", weight / n));
            }
            let min = norms.iter().map(|ns| ns[k - 1]).fold(f64::INFINITY, f64::min);
            let failed = t.failures.len() - before;
            t.row(d, k, failed as f64, norms.len(), json!({ "check": "norms", "min_k_norm": min, "bound": bound }));
        }
    }
    Ok(())
}

fn chain(cfg: &ExperimentConfig, t: &mut Tally) -> Result<()> {
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let ops = par_map(cfg.samples, |i| random_hermitian_direction(d, false, &mut seed.child(i as u32).rng()))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        for k in cfg.ks(d).into_iter().filter(|&k| 2 * k <= d) {
            let before = t.failures.len();
            let bound = (k as f64).sqrt() / (d as f64).powf(1.5);
            let runs = par_map(ops.len(), |i| -> Result<(f64, f64, f64)> {
                let s = seed.child(i as u32).child(k as u32);
                let sc = seesaw_config(cfg, s);
                let r = sk_norm(&ops[i], k, &sc)?;
                let pol = polarized_2k_witness(&ops[i], &r.witness[0], &r.witness[1], k)?;
                // the warm start alone guarantees the chain; one extra restart suffices
                let qc = SeeSawConfig { restarts: 1, ..sc };
                let q = quadratic_extremum_k_from(&ops[i], 2 * k, Sense::MaxAbs, &qc, &pol.witness)?;
                Ok((r.value, pol.value, q.value.abs()))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            let mut above = 0;
            for (i, &(sk, pol, q)) in runs.iter().enumerate() {
                let s = seed.child(i as u32).child(k as u32);
                t.check(pol >= sk - TOL, "polarized_witness", d, k, s, || format!("{pol} < {sk}"));
                t.check(q >= pol - TOL, "quadratic_2k", d, k, s, || format!("{q} < {pol}"));
                if sk >= bound - 1e-6 {
                    above += 1;
                } else {
                    t.failures.push(Failure {
                        check: "below_scaling_bound".into(),
                        d,
                        k,
                        seed: s,
                        detail: format!("{sk} < {bound}"),
                    });
                }
            }
            // individual shortfalls are listed only when the aggregate fraction fails
            let recorded: Vec<Failure> = t.failures.drain(before..).collect();
            let (info, hard): (Vec<_>, Vec<_>) = recorded.into_iter().partition(|f| f.check == "below_scaling_bound");
            t.failures.extend(hard);
            let fraction = above as f64 / runs.len().max(1) as f64;
            let ok = t.check(fraction >= 0.99, "scaling_bound_fraction", d, k, seed, || format!("{fraction} < 0.99"));
            if !ok {
                t.failures.extend(info);
            }
            let failed = t.failures.len() - before;
            t.row(d, k, failed as f64, runs.len(), json!({ "check": "chain", "fraction_above_bound": fraction, "bound": bound }));
        }
    }
    Ok(())
}

fn duality(cfg: &ExperimentConfig, t: &mut Tally) -> Result<()> {
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        for k in cfg.ks(d) {
            let before = t.failures.len();
            let certs = par_map(cfg.samples, |i| {
                let s = seed.child(i as u32);
                let y = random_normalized_y(d, cfg.t_max, s)?;
                base_dual_test(&y, k, &seesaw_config(cfg, s.child(k as u32)))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
            for (i, c) in certs.iter().enumerate() {
                let s = seed.child(i as u32);
                t.check(c.routes_agree, "routes_agree", d, k, s, || {
                    format!("bases {} vs direct {}", c.member_bases, c.member_direct)
                });
                t.check(c.identity_defect <= 1e-8, "affine_identity", d, k, s, || format!("defect {}", c.identity_defect));
            }
            let failed = t.failures.len() - before;
            let members = certs.iter().filter(|c| c.member_direct).count();
            t.row(d, k, failed as f64, certs.len(), json!({ "check": "duality", "members": members }));
        }
    }
    Ok(())
}

fn width(cfg: &ExperimentConfig, t: &mut Tally) -> Result<()> {
    let base = SeedSpec::new(cfg.seed, 0);
    let g1 = gamma_n(1)?;
    let g2 = gamma_n(2)?;
    t.check((g1 - (std::f64::consts::PI / 2.0).sqrt()).abs() <= 1e-12, "gamma_1", 0, 0, base, || format!("{g1}"));
    t.check((g2 - (2.0 / std::f64::consts::PI).sqrt()).abs() <= 1e-12, "gamma_2", 0, 0, base, || format!("{g2}"));
    for e in 1..=6 {
        let n = 10usize.pow(e);
        let v = gamma_n(n)? * (n as f64).sqrt();
        t.check((0.9..=1.3).contains(&v), "gamma_scaling", 0, 0, base, || format!("n = {n}: {v}"));
    }
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let n = d.pow(4) - 1;
        let ball = mean_width_mc(&BallSupport { dim: n }, n, cfg.samples, seed.with_stream(1))?;
        let z = ball.width.z_score(2.0);
        t.check(z <= 3.0, "ball_width", d, 0, seed.with_stream(1), || format!("z = {z}"));
        t.row(d, 0, ball.width.value, ball.width.n, json!({ "check": "ball_width", "z": z }));

        let ks = cfg.ks(d);
        let grid = entk_width_grid(d, &ks, cfg.samples, &seesaw_config(cfg, base), seed)?;
        for (idx, (k, w)) in ks.iter().zip(&grid).enumerate() {
            if idx > 0 {
                let prev = grid[idx - 1].width.value;
                t.check(w.width.value >= prev - TOL, "width_monotone", d, *k, seed, || format!("{} < {prev}", w.width.value));
            }
            let scale = (*k as f64).sqrt() / (d as f64).powf(1.5);
            t.row(d, *k, w.width.value, w.width.n, json!({ "check": "entk_width", "ratio_to_scaling": w.half_width() / scale }));
        }
    }
    Ok(())
}

fn prob(cfg: &ExperimentConfig, t: &mut Tally) -> Result<()> {
    let bc = bracket_config(cfg);
    for &d in &cfg.d {
        let seed = cell_seed(cfg, d);
        let mut prev: Option<(f64, f64)> = None;
        for k in 1..=d {
            let p = prob_schmidt_k(d, k, cfg.samples, &bc, seed)?;
            let (lo, hi) = (p.p_lo.value, p.p_hi.value);
            t.check(lo <= hi, "bracket_order", d, k, seed, || format!("{lo} > {hi}"));
            if let Some((plo, phi)) = prev {
                t.check(plo <= lo && phi <= hi, "monotone_in_k", d, k, seed, || format!("({plo}, {phi}) -> ({lo}, {hi})"));
            }
            if k == d {
                t.check(lo == 1.0 && p.exact, "full_rank_is_certain", d, k, seed, || format!("p_lo = {lo}"));
            }
            if d == 2 && k == 1 {
                t.check(p.exact && lo == hi, "two_qubit_exact", d, k, seed, || format!("({lo}, {hi})"));
            }
            t.row(d, k, lo, p.p_lo.n, json!({ "check": "prob", "p_hi": hi, "exact": p.exact }));
            prev = Some((lo, hi));
        }
    }
    Ok(())
}
