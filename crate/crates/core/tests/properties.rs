use proptest::prelude::*;

use entgeo::cone::{base_dual_test, is_trace_preserving, k_block_positivity, BlockPositivity, QuantumMap};
use entgeo::ensembles::{
    ginibre, random_haar_bipartite, random_haar_vector, random_hermitian_direction, random_hs_state,
    random_k_entangled, random_unitary, SeedSpec,
};
use entgeo::linalg::{eigh_sorted, hs_norm, kron, CMatrix, C64};
use entgeo::seesaw::{support_entk, SeeSawConfig};
use entgeo::tensor::{
    bures_distance_pure, hs_distance_pure, k_norm, phase_min_distance, projector_distance, schmidt_coefficients,
    schmidt_decompose, schmidt_rank, subset_truncate, BipartiteVector, HermitianOperator,
};

fn vector(d: usize, seed: u64) -> BipartiteVector {
    random_haar_bipartite(d, &mut SeedSpec::new(seed, 0).rng())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_norm_bounds_and_monotonicity(d in 2usize..7, seed in any::<u64>()) {
        let xi = vector(d, seed);
        let mut prev = 0.0;
        for k in 1..=d {
            let v = k_norm(&xi, k).unwrap();
            prop_assert!(v >= (k as f64 / d as f64).sqrt() - 1e-12);
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
        prop_assert!((prev - 1.0).abs() < 1e-12);
    }

    #[test]
    fn schmidt_invariants(d in 1usize..6, seed in any::<u64>()) {
        let xi = vector(d, seed);
        let sd = schmidt_decompose(&xi).unwrap();
        prop_assert!(sd.s.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((sd.s.iter().map(|s| s * s).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(sd.reconstruct().sub(&xi).norm() < 1e-12);
        let mut rng = SeedSpec::new(seed, 1).rng();
        let u = random_unitary(d, &mut rng);
        let v = random_unitary(d, &mut rng);
        let moved = BipartiteVector::from_vector(d, kron(&u, &v) * xi.amps()).unwrap();
        for (a, b) in schmidt_coefficients(&xi).iter().zip(schmidt_coefficients(&moved)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn subset_average(d in 2usize..6, k in 1usize..6, seed in any::<u64>()) {
        prop_assume!(k <= d);
        let xi = vector(d, seed);
        let mut n = 0.0;
        let mut weight = 0.0;
        for mask in 0u32..(1 << d) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let l: Vec<usize> = (0..d).filter(|j| mask & (1 << j) != 0).collect();
            weight += subset_truncate(&xi, &l).unwrap().norm().powi(2);
            n += 1.0;
        }
        prop_assert!((weight / n - k as f64 / d as f64).abs() < 1e-10);
    }

    #[test]
    fn pure_state_metrics(d in 1usize..5, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (xi, eta) = (vector(d, s1), vector(d, s2));
        let hs = hs_distance_pure(&xi, &eta);
        let q = bures_distance_pure(&xi, &eta);
        // overlap closed forms lose half the digits as the overlap tends to 1
        prop_assert!((hs - projector_distance(&xi, &eta)).abs() < 1e-7);
        prop_assert!((q - phase_min_distance(&xi, &eta)).abs() < 1e-7);
        if q > 1e-6 {
            let r = hs / q;
            prop_assert!((1.0 - 1e-9..=2f64.sqrt() + 1e-9).contains(&r));
        }
    }

    #[test]
    fn choi_round_trip(d in 1usize..4, seed in any::<u64>(), count in 1usize..4) {
        let mut rng = SeedSpec::new(seed, 0).rng();
        let kraus: Vec<CMatrix> = (0..count).map(|_| ginibre(d, d, &mut rng)).collect();
        let m = QuantumMap::from_kraus(kraus.clone()).unwrap();
        let back = QuantumMap::from_superoperator(d, &m.superoperator()).unwrap();
        prop_assert!(hs_norm(&(back.choi.matrix() - m.choi.matrix())) < 1e-10);
        // Φ(ρ) = Σ A†ρA
        let x = ginibre(d, d, &mut rng);
        let direct = kraus.iter().fold(CMatrix::zeros(d, d), |acc, a| acc + a.adjoint() * &x * a);
        prop_assert!(hs_norm(&(m.apply(&x).unwrap() - direct)) < 1e-10);
    }

    #[test]
    fn completely_positive_maps_are_never_refuted(d in 2usize..4, seed in any::<u64>()) {
        let mut rng = SeedSpec::new(seed, 0).rng();
        let m = QuantumMap::from_kraus(vec![ginibre(d, d, &mut rng), ginibre(d, d, &mut rng)]).unwrap();
        for k in 1..=d {
            let c = k_block_positivity(&m, k, &SeeSawConfig { restarts: 3, ..SeeSawConfig::default() }).unwrap();
            prop_assert_eq!(c.status, BlockPositivity::NotRefuted);
            prop_assert!(c.exact);
        }
    }

    #[test]
    fn unitary_channels_preserve_trace(d in 1usize..4, seed in any::<u64>()) {
        let u = random_unitary(d, &mut SeedSpec::new(seed, 0).rng());
        let m = QuantumMap::from_kraus(vec![u]).unwrap();
        prop_assert!(is_trace_preserving(&m, 1e-10));
    }

    #[test]
    fn support_is_monotone_and_bounded(d in 2usize..4, seed in any::<u64>()) {
        let a = random_hermitian_direction(d, true, &mut SeedSpec::new(seed, 0).rng()).unwrap();
        let cfg = SeeSawConfig { restarts: 3, ..SeeSawConfig::with_seed(SeedSpec::new(seed, 1)) };
        let top = a.max_eigenvalue();
        let h1 = support_entk(&a, 1, &cfg).unwrap().value;
        let hd = support_entk(&a, d, &cfg).unwrap().value;
        prop_assert!(h1 <= hd + 1e-12);
        prop_assert!((hd - top).abs() < 1e-9);
    }

    #[test]
    fn maximally_mixed_point_is_in_every_base(d in 2usize..4, k in 1usize..4, seed in any::<u64>()) {
        prop_assume!(k <= d);
        let e = HermitianOperator::identity(d).scaled(1.0 / d as f64);
        let c = base_dual_test(&e, k, &SeeSawConfig::with_seed(SeedSpec::new(seed, 0))).unwrap();
        prop_assert!(c.member_bases && c.member_direct);
        prop_assert!(c.identity_defect < 1e-8);
    }
}

#[test]
fn hs_states_average_to_maximally_mixed() {
    let n = 3;
    let draws = 4000;
    let mut acc = CMatrix::zeros(n * n, n * n);
    for i in 0..draws {
        acc += random_hs_state(n, &mut SeedSpec::new(11, 0).child(i).rng()).matrix();
    }
    acc /= C64::new(draws as f64, 0.0);
    let dev = hs_norm(&(acc - CMatrix::identity(n * n, n * n) / C64::new((n * n) as f64, 0.0)));
    assert!(dev < 0.01, "{dev}");
}

#[test]
fn haar_overlap_with_basis_vector() {
    let n = 6;
    let draws = 20_000;
    let mean = (0..draws)
        .map(|i| random_haar_vector(n, &mut SeedSpec::new(12, 0).child(i).rng())[0].norm_sqr())
        .sum::<f64>()
        / draws as f64;
    // variance of |v_0|² is (n-1)/(n²(n+1))
    let se = (((n - 1) as f64) / ((n * n * (n + 1)) as f64) / draws as f64).sqrt();
    assert!((mean - 1.0 / n as f64).abs() < 4.0 * se, "{mean}");
}

#[test]
fn k_entangled_draws_have_exact_rank() {
    for i in 0..10_000 {
        let v = random_k_entangled(4, 2, &mut SeedSpec::new(13, 0).child(i).rng()).unwrap();
        assert_eq!(schmidt_rank(&v), 2);
    }
}

/// Maximum of `⟨u⊗v|A|u⊗v⟩` by a Bloch-sphere mesh over `u` with the exact
/// optimum over `v` (top eigenvalue of the 2×2 compression).
fn product_mesh_max(a: &HermitianOperator, steps: usize) -> f64 {
    let m = a.matrix();
    let mut best = f64::NEG_INFINITY;
    for it in 0..=steps {
        let theta = std::f64::consts::PI * it as f64 / steps as f64;
        let phis = if it == 0 || it == steps { 1 } else { 2 * steps };
        for ip in 0..phis {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / (2 * steps) as f64;
            let u = [C64::new((theta / 2.0).cos(), 0.0), C64::from_polar((theta / 2.0).sin(), phi)];
            let b = CMatrix::from_fn(2, 2, |x, y| {
                let mut s = C64::new(0.0, 0.0);
                for i in 0..2 {
                    for j in 0..2 {
                        s += u[i].conj() * m[(i * 2 + x, j * 2 + y)] * u[j];
                    }
                }
                s
            });
            let top = eigh_sorted(&b).values[1];
            best = best.max(top);
        }
    }
    best
}

#[test]
fn two_qubit_product_search_matches_mesh() {
    for i in 0..100 {
        let a = random_hermitian_direction(2, false, &mut SeedSpec::new(14, 0).child(i).rng()).unwrap();
        let s = support_entk(&a, 1, &SeeSawConfig::with_seed(SeedSpec::new(14, 1).child(i))).unwrap().value;
        let mesh = product_mesh_max(&a, 200);
        assert!(mesh <= s + 1e-12, "mesh {mesh} above search {s}");
        assert!(s - mesh < 1e-4, "search {s} vs mesh {mesh}");
    }
}
