//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any fails.

use std::process::Command as Proc;
use std::time::{Duration, Instant};

use entgeo::cone::{base_dual_test, k_block_positivity, random_normalized_y, BracketConfig, QuantumMap};
use entgeo::ensembles::{
    ginibre, par_map, random_haar_bipartite, random_hermitian_direction, random_unitary, SeedSpec,
};
use entgeo::linalg::{kron, CVector, C64};
use entgeo::seesaw::{
    polarized_2k_witness, product_average_check, quadratic_extremum_k_from, sk_norm, SeeSawConfig, Sense,
};
use entgeo::tensor::{k_norm, schmidt_coefficients, subset_truncate, BipartiteVector, Operator};
use entgeo::volumetry::{entk_width_grid, gamma_n, mean_width_mc, prob_schmidt_k, santalo_check, BallSupport, Body};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn flat_vector(d: usize, seed: SeedSpec) -> BipartiteVector {
    let mut rng = seed.rng();
    let u = random_unitary(d, &mut rng);
    let v = random_unitary(d, &mut rng);
    let mut amps = CVector::zeros(d * d);
    for j in 0..d {
        amps[j * d + j] = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    }
    BipartiteVector::from_vector(d, kron(&u, &v) * amps).unwrap()
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << d))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..d).filter(|j| m & (1 << j) != 0).collect())
        .collect()
}

fn knorm_inequality() -> Outcome {
    let (mut violations, mut near_equal, mut flat_bad, mut worst) = (0, 0, 0, f64::INFINITY);
    for d in 2..=8 {
        let seed = SeedSpec::new(101, d as u32);
        let coeffs = par_map(10_000, |i| schmidt_coefficients(&random_haar_bipartite(d, &mut seed.child(i as u32).rng())));
        for s in &coeffs {
            let mut acc = 0.0;
            for k in 1..=d {
                acc += s[k - 1] * s[k - 1];
                let gap = acc.sqrt() - (k as f64 / d as f64).sqrt();
                worst = worst.min(gap);
                if gap < -1e-12 {
                    violations += 1;
                }
                if k < d && gap.abs() <= 1e-10 {
                    near_equal += 1;
                }
            }
        }
        for i in 0..100 {
            let xi = flat_vector(d, seed.with_stream(1_000_000 + i));
            for k in 1..=d {
                if (k_norm(&xi, k).unwrap() - (k as f64 / d as f64).sqrt()).abs() > 1e-10 {
                    flat_bad += 1;
                }
            }
        }
    }
    outcome(
        violations == 0 && near_equal == 0 && flat_bad == 0,
        format!("violations {violations}, non-flat equalities {near_equal}, flat mismatches {flat_bad}, min gap {worst:.3e}"),
    )
}

fn subset_averaging() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        for k in 1..=d {
            let lambdas = subsets(d, k);
            let seed = SeedSpec::new(202, (d * 16 + k) as u32);
            for i in 0..100 {
                let mut rng = seed.child(i).rng();
                let scale = 0.5 + (i as f64) / 50.0;
                let xi = random_haar_bipartite(d, &mut rng).scaled(C64::new(scale, 0.0));
                let (mut overlap, mut weight) = (0.0, 0.0);
                for l in &lambdas {
                    let part = subset_truncate(&xi, l).unwrap();
                    overlap += xi.inner(&part).re;
                    weight += part.norm().powi(2);
                }
                let n = lambdas.len() as f64;
                let target = k as f64 / d as f64 * xi.norm().powi(2);
                worst = worst.max((overlap / n - target).abs()).max((weight / n - target).abs());
            }
        }
    }
    outcome(worst <= 1e-10, format!("max deviation {worst:.3e}"))
}

fn chain_inequality() -> Outcome {
    let (mut chain_violations, mut cases, mut below) = (0, 0, 0);
    let mut worst_fraction: f64 = 1.0;
    for d in 2..=5 {
        for k in (1..=d / 2).filter(|k| 2 * k <= d) {
            let seed = SeedSpec::new(303, (d * 16 + k) as u32);
            let res = par_map(1000, |i| {
                let s = seed.child(i as u32);
                let a = random_hermitian_direction(d, false, &mut s.rng()).unwrap();
                let cfg = SeeSawConfig { restarts: 50, ..SeeSawConfig::with_seed(s.child(1)) };
                let r = sk_norm(&a, k, &cfg).unwrap();
                let re = a.matrix_element(&r.witness[0], &r.witness[1]).re;
                let pol = polarized_2k_witness(&a, &r.witness[0], &r.witness[1], k).unwrap();
                let qc = SeeSawConfig { restarts: 1, ..cfg };
                let q = quadratic_extremum_k_from(&a, 2 * k, Sense::MaxAbs, &qc, &pol.witness).unwrap();
                let ok = q.value.abs() >= pol.value - 1e-12 && pol.value >= re - 1e-12;
                (ok, r.value >= (k as f64).sqrt() / (d as f64).powf(1.5) - 1e-6)
            });
            chain_violations += res.iter().filter(|r| !r.0).count();
            let above = res.iter().filter(|r| r.1).count();
            below += res.len() - above;
            worst_fraction = worst_fraction.min(above as f64 / res.len() as f64);
            cases += res.len();
        }
    }
    outcome(
        chain_violations == 0 && worst_fraction >= 0.99,
        format!("{cases} operators, chain violations {chain_violations}, below scaling bound {below}, worst cell fraction {worst_fraction:.4}"),
    )
}

fn product_average() -> Outcome {
    let (mut within, mut total) = (0, 0);
    for d in 2..=5 {
        for i in 0..20 {
            let seed = SeedSpec::new(404, (d * 32 + i) as u32);
            let g = ginibre(d * d, d * d, &mut seed.rng());
            let norm = g.norm();
            let a = Operator::new(d, g.unscale(norm)).unwrap();
            let e = product_average_check(&a, 100_000, seed.child(0)).unwrap();
            if e.z_score(1.0 / (d * d) as f64) <= 3.0 {
                within += 1;
            }
            total += 1;
        }
    }
    let frac = within as f64 / total as f64;
    outcome(frac >= 0.95, format!("{within}/{total} within 3 stderr"))
}

fn swap_certificates() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=4 {
        let m = QuantumMap::transpose(d);
        let cfg = SeeSawConfig::with_seed(SeedSpec::new(505, d as u32));
        let k1 = k_block_positivity(&m, 1, &cfg).unwrap().min_estimate;
        let k2 = k_block_positivity(&m, 2, &cfg).unwrap().min_estimate;
        worst = worst.max(k1.abs()).max((k2 + 1.0).abs());
    }
    outcome(worst <= 1e-8, format!("max deviation {worst:.3e}"))
}

fn duality_routes() -> Outcome {
    let (mut disagree, mut worst, mut members, mut total): (usize, f64, usize, usize) = (0, 0.0, 0, 0);
    for d in 2..=4 {
        for k in 1..=d {
            let seed = SeedSpec::new(606, (d * 16 + k) as u32);
            let certs = par_map(1000, |i| {
                let s = seed.child(i as u32);
                let y = random_normalized_y(d, 1.0, s).unwrap();
                base_dual_test(&y, k, &SeeSawConfig { restarts: 4, ..SeeSawConfig::with_seed(s.child(1)) }).unwrap()
            });
            disagree += certs.iter().filter(|c| !c.routes_agree).count();
            members += certs.iter().filter(|c| c.member_direct).count();
            worst = certs.iter().map(|c| c.identity_defect).fold(worst, f64::max);
            total += certs.len();
        }
    }
    outcome(
        disagree == 0 && worst <= 1e-8,
        format!("{total} tests ({members} members), disagreements {disagree}, max identity defect {worst:.3e}"),
    )
}

fn two_qubit_probability() -> Outcome {
    let cfg = BracketConfig::default();
    let runs: Vec<_> = (0..5).map(|s| prob_schmidt_k(2, 1, 1_000_000, &cfg, SeedSpec::new(707 + s, 0)).unwrap()).collect();
    let exact = runs.iter().all(|r| r.exact && r.p_lo.value == r.p_hi.value);
    let max_se = runs.iter().map(|r| r.p_lo.stderr).fold(0.0, f64::max);
    let mut stable = true;
    for a in &runs {
        for b in &runs {
            let tol = 3.0 * (a.p_lo.stderr.powi(2) + b.p_lo.stderr.powi(2)).sqrt();
            stable &= (a.p_lo.value - b.p_lo.value).abs() <= tol;
        }
    }
    let vals: Vec<String> = runs.iter().map(|r| format!("{:.5}", r.p_lo.value)).collect();
    outcome(exact && stable && max_se < 5e-4, format!("p = [{}], max stderr {max_se:.2e}, exact {exact}", vals.join(", ")))
}

fn width_machinery() -> Outcome {
    let mut ok = true;
    let mut zs = Vec::new();
    for (i, n) in [2usize, 15, 80].into_iter().enumerate() {
        let e = mean_width_mc(&BallSupport { dim: n }, n, 10_000, SeedSpec::new(808, i as u32)).unwrap();
        let z = e.width.z_score(2.0);
        ok &= z <= 3.0;
        zs.push(format!("n={n}: z={z:.2}"));
    }
    let g1 = (gamma_n(1).unwrap() - (std::f64::consts::PI / 2.0).sqrt()).abs();
    let g2 = (gamma_n(2).unwrap() - (2.0 / std::f64::consts::PI).sqrt()).abs();
    ok &= g1 <= 1e-12 && g2 <= 1e-12;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for n in 10..=1_000_000usize {
        let v = gamma_n(n).unwrap() * (n as f64).sqrt();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    ok &= lo >= 0.9 && hi <= 1.3;
    outcome(ok, format!("ball {}, gamma errors {g1:.1e}/{g2:.1e}, gamma_n*sqrt(n) in [{lo:.4}, {hi:.4}]", zs.join(", ")))
}

fn width_scaling() -> Outcome {
    let cfg = SeeSawConfig { restarts: 4, ..SeeSawConfig::default() };
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut monotone = true;
    let mut directions = Vec::new();
    let mut table = Vec::new();
    for d in 2..=6 {
        let ks: Vec<usize> = (1..=d).collect();
        let grid = entk_width_grid(d, &ks, 1000, &cfg, SeedSpec::new(909, d as u32)).unwrap();
        let ratios: Vec<f64> = ks
            .iter()
            .zip(&grid)
            .map(|(&k, w)| w.width.value / ((k as f64).sqrt() / (d as f64).powf(1.5)))
            .collect();
        for &r in &ratios {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let up = ratios.windows(2).all(|w| w[1] >= w[0]);
        let down = ratios.windows(2).all(|w| w[1] <= w[0]);
        monotone &= up || down;
        directions.push(if up && !down { "up" } else if down && !up { "down" } else if up { "flat" } else { "mixed" });
        table.push(format!("d={d}: {}", ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" ")));
    }
    println!("      width ratios w/(k^1/2 d^-3/2): {}", table.join("; "));
    outcome(
        hi / lo <= 10.0 && monotone,
        format!("ratio range [{lo:.3}, {hi:.3}] spread {:.2}, monotone in k per d: {}", hi / lo, directions.join(",")),
    )
}

fn santalo() -> Outcome {
    let mut ok = true;
    let mut max: f64 = 0.0;
    for m in 1..=10 {
        for body in [Body::Cube, Body::CrossPolytope, Body::Ball] {
            let r = santalo_check(body, m, 0.1).unwrap();
            ok &= r.satisfies_upper && r.product <= 1.0;
            if body != Body::Ball {
                max = max.max(r.product);
            }
        }
    }
    let planar = santalo_check(Body::Cube, 2, 0.1).unwrap().product;
    let err = (planar - 8f64.sqrt() / std::f64::consts::PI).abs();
    outcome(ok && err <= 1e-12, format!("max cube/cross product {max:.6}, planar error {err:.1e}"))
}

fn cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_entgeo");
    let dir = std::env::temp_dir().join(format!("entgeo-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let vec_file = dir.join("xi.json");
    entgeo::io::ArrayFile::from_vector(&flat_vector(3, SeedSpec::new(1, 1))).write(&vec_file).unwrap();
    let vec_arg = vec_file.display().to_string();
    let runs: Vec<Vec<&str>> = vec![
        vec!["knorm", "--d", "2..4", "--samples", "200"],
        vec!["knorm", "--input", &vec_arg],
        vec!["sknorm", "--d", "2..3", "--samples", "5", "--restarts", "5"],
        vec!["blockpos", "--d", "2..3"],
        vec!["dual", "--d", "2..3", "--samples", "10", "--restarts", "3"],
        vec!["ppt", "--d", "2..3", "--samples", "500"],
        vec!["prob", "--d", "2..3", "--samples", "300"],
        vec!["width", "--d", "2..3", "--samples", "10"],
        vec!["bounds", "--d", "2..5"],
        vec!["santalo", "--m", "1..10"],
        vec!["verify", "norms", "--d", "2..4", "--samples", "20"],
        vec!["verify", "chain", "--d", "2..4", "--samples", "5", "--restarts", "5"],
        vec!["verify", "duality", "--d", "2..3", "--samples", "5", "--restarts", "3"],
        vec!["verify", "width", "--d", "2", "--samples", "20"],
        vec!["verify", "prob", "--d", "2..3", "--samples", "100"],
    ];
    let mut mismatches = Vec::new();
    for args in &runs {
        let mut outputs = Vec::new();
        for workers in ["1", "4", "16", "1"] {
            let out = Proc::new(bin)
                .args(args)
                .args(["--format", "csv", "--seed", "17", "--workers", workers])
                .output()
                .expect("run entgeo");
            outputs.push((out.status.code(), out.stdout));
        }
        if outputs.iter().any(|o| o != &outputs[0]) || outputs[0].0 != Some(0) || outputs[0].1.is_empty() {
            mismatches.push(args.join(" "));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(
        mismatches.is_empty(),
        format!("{} invocations x workers 1/4/16 + rerun, mismatches: [{}]", runs.len(), mismatches.join("; ")),
    )
}

fn main() {
    type Criterion = (usize, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 11] = [
        (1, "k-norm lower bound and flat-spectrum equality", knorm_inequality, Some(Duration::from_secs(60))),
        (2, "subset-averaging identities", subset_averaging, None),
        (3, "chain inequality at witness level", chain_inequality, Some(Duration::from_secs(600))),
        (4, "product-state average", product_average, None),
        (5, "SWAP certificates of the transpose map", swap_certificates, None),
        (6, "duality-route agreement", duality_routes, None),
        (7, "two-qubit separable probability", two_qubit_probability, Some(Duration::from_secs(300))),
        (8, "width machinery", width_machinery, None),
        (9, "width scaling", width_scaling, Some(Duration::from_secs(1800))),
        (10, "Santalo products", santalo, None),
        (11, "CLI determinism across worker counts", cli_determinism, None),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let mut o = run();
        let took = start.elapsed();
        if let Some(b) = budget {
            if took > b {
                o.pass = false;
                o.detail.push_str(&format!("; over time budget {}s", b.as_secs()));
            }
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2} {name}: {} ({:.1}s)", o.detail, took.as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        std::process::exit(1);
    }
    println!("acceptance: all criteria passed");
}
