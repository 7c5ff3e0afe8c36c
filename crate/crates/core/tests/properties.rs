mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rocn_core::construct::build_self_testing_matrix;
use rocn_core::rocn::{classical_bound, quantum_bound, validate_rocn, MatrixFile, RocnMatrix};
use rocn_core::selftest::{
    build_moment_matrix, kernel_witness_check, rank_criterion, spanning_criterion,
    DEFAULT_RANK_THRESHOLD,
};
use rocn_core::strategy::{canonical_strategy, correlations, probabilities};
use rocn_core::symspan::{
    closed_form_coefficients, closed_form_vector, gram_schmidt_family, spanning_rank,
    symmetric_dimension, SymCoefficients, VectorFamily,
};

use common::{
    brute_force_local_bound, classical_gram_schmidt, max_abs_diff, random_block_rocn,
    random_orthogonal,
};

fn random_rocn(seed: u64, m: usize, blocks: usize) -> RocnMatrix {
    random_block_rocn(m, blocks, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Row/column sign flips and permutations of `h`, driven by `seed`.
fn scramble(h: &RocnMatrix, seed: u64, rows: bool) -> RocnMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, n) = (h.m(), h.n());
    let mut row_perm: Vec<usize> = (0..m).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();
    if rows {
        row_perm.shuffle(&mut rng);
    }
    col_perm.shuffle(&mut rng);
    let row_sign: Vec<f64> = (0..m)
        .map(|_| {
            if rows && rand::Rng::random_bool(&mut rng, 0.5) {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let col_sign: Vec<f64> = (0..n)
        .map(|_| {
            if rand::Rng::random_bool(&mut rng, 0.5) {
                -1.0
            } else {
                1.0
            }
        })
        .collect();
    let e = DMatrix::from_fn(m, n, |i, j| {
        row_sign[i] * col_sign[j] * h.get(row_perm[i], col_perm[j])
    });
    RocnMatrix::from_matrix(e, None, 1e-9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn classical_below_quantum(seed in any::<u64>(), m in 1usize..6, blocks in 1usize..4) {
        let h = random_rocn(seed, m, blocks);
        let c = classical_bound(&h).unwrap();
        prop_assert!(c <= quantum_bound(&h) + 1e-12);
        let all_ones: f64 = (0..h.n()).map(|j| (0..m).map(|i| h.get(i, j)).sum::<f64>().abs()).sum();
        prop_assert!(c >= all_ones - 1e-12);
    }

    #[test]
    fn classical_matches_brute_force(seed in any::<u64>(), m in 1usize..4, blocks in 1usize..3) {
        let h = random_rocn(seed, m, blocks);
        let fast = classical_bound(&h).unwrap();
        let oracle = brute_force_local_bound(&h);
        prop_assert!((fast - oracle).abs() <= 1e-12, "{} vs {}", fast, oracle);
    }

    #[test]
    fn classical_symmetries(seed in any::<u64>(), m in 2usize..6, blocks in 1usize..3) {
        let h = random_rocn(seed, m, blocks);
        let g = scramble(&h, seed ^ 0xabcdef, true);
        let (a, b) = (classical_bound(&h).unwrap(), classical_bound(&g).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn rank_invariant_under_column_moves(seed in any::<u64>(), half in 1usize..3, blocks in 1usize..4) {
        let m = 2 * half;
        let h = random_rocn(seed, m, blocks);
        let g = scramble(&h, seed.wrapping_add(7), false);
        let a = rank_criterion(&h, DEFAULT_RANK_THRESHOLD).unwrap();
        let b = rank_criterion(&g, DEFAULT_RANK_THRESHOLD).unwrap();
        prop_assert_eq!(a.rank_m, b.rank_m);
        prop_assert_eq!(a.spanning_passes, b.spanning_passes);
    }

    #[test]
    fn criteria_are_consistent(seed in any::<u64>(), half in 1usize..3, blocks in 1usize..6) {
        let m = 2 * half;
        let h = random_rocn(seed, m, blocks);
        let v = rank_criterion(&h, DEFAULT_RANK_THRESHOLD).unwrap();
        if spanning_criterion(&h) {
            prop_assert!(v.rank_passes);
        }
        if v.rank_passes {
            prop_assert!(v.counting_ok);
        }
    }

    #[test]
    fn witness_is_sound(seed in any::<u64>(), blocks in 1usize..3) {
        // With m = 4 and n ≤ 8 the rank often fails; when it does the
        // witness must annihilate every h_j ⊗ h_j.
        let h = random_rocn(seed, 4, blocks);
        let v = rank_criterion(&h, DEFAULT_RANK_THRESHOLD).unwrap();
        prop_assert_eq!(v.rank_passes, v.witness.is_none());
        if let Some(w) = v.witness {
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
            prop_assert!(w.is_null_diagonal(0.0));
            prop_assert!(kernel_witness_check(&h, &w).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn bilinear_form_matches_moment_matrix(seed in any::<u64>(), half in 1usize..3, blocks in 1usize..4,
                                           coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6)) {
        let m = 2 * half;
        let h = random_rocn(seed, m, blocks);
        let moments = build_moment_matrix(&h).unwrap();
        let mut o = SymCoefficients::zeros(m);
        for (&(i, k), &(re, im)) in moments.pairs().iter().zip(&coeffs) {
            o.set(i, k, Complex64::new(re, im));
        }
        let direct = kernel_witness_check(&h, &o).unwrap();
        let mut via_m = 0.0f64;
        for j in 0..h.n() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, &(i, k)) in moments.pairs().iter().enumerate() {
                acc += o.get(i, k) * moments.entries()[(j, c)];
            }
            via_m = via_m.max((acc * 2.0).norm());
        }
        prop_assert!((direct - via_m).abs() <= 1e-12);
    }

    #[test]
    fn moment_columns_sum_to_row_overlaps(seed in any::<u64>(), half in 1usize..4, blocks in 1usize..4) {
        let m = 2 * half;
        let h = random_rocn(seed, m, blocks);
        let moments = build_moment_matrix(&h).unwrap();
        for (c, &(i, k)) in moments.pairs().iter().enumerate() {
            let sum: f64 = moments.entries().column(c).iter().sum();
            prop_assert!(sum.abs() <= 1e-9);
            for j in 0..h.n() {
                prop_assert_eq!(moments.entries()[(j, c)], h.get(i, j) * h.get(k, j));
            }
        }
    }

    #[test]
    fn canonical_strategy_attains_bound(seed in any::<u64>(), m in 2usize..7, blocks in 1usize..4) {
        let h = random_rocn(seed, m, blocks);
        let s = canonical_strategy(&h).unwrap();
        prop_assert!(s.bob.involution_residual() <= 1e-12);
        prop_assert!(s.bob.hermiticity_residual() <= 1e-12);
        let table = correlations(&s);
        prop_assert!((&table.joint - h.entries()).amax() <= 1e-12);
        let p = probabilities(&table).unwrap();
        prop_assert!(p.min_probability() >= -1e-12);
        prop_assert!(p.normalization_residual() <= 1e-12);
    }

    #[test]
    fn matrix_json_round_trips_bitwise(rows in prop::collection::vec(prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 3), 1..4)) {
        let file = MatrixFile { m: rows.len(), n: 3, entries: rows.clone(), label: "prop".into() };
        let back = MatrixFile::parse(&file.to_json()).unwrap();
        for (a, b) in back.entries.iter().flatten().zip(rows.iter().flatten()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn orthogonal_matrices_validate_tightly(seed in any::<u64>(), m in 1usize..10) {
        let o = random_orthogonal(m, &mut ChaCha8Rng::seed_from_u64(seed));
        let rows: Vec<Vec<f64>> = o.row_iter().map(|r| r.iter().copied().collect()).collect();
        let out = validate_rocn(&rows, 1e-9).unwrap();
        prop_assert!(out.valid);
        prop_assert!(out.worst_row_pair_residual < 1e-13 && out.worst_column_residual < 1e-13);
    }
}

#[test]
fn gram_schmidt_families_are_orthonormal() {
    for m in 2..=12 {
        for i in 1..=m {
            let fam = gram_schmidt_family(m, i).unwrap();
            let v = fam.vectors();
            for a in 0..m {
                for b in 0..m {
                    let dot: f64 = v[a].iter().zip(&v[b]).map(|(x, y)| x * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() <= 1e-12, "m={m} i={i} ({a},{b}) {dot}");
                }
            }
        }
    }
}

#[test]
fn gram_schmidt_matches_oracle_and_closed_form_for_all_m() {
    for m in 2..=12 {
        for i in 1..=m {
            let fam = gram_schmidt_family(m, i).unwrap();
            let oracle = classical_gram_schmidt(m, i - 1);
            for k in 1..=m {
                let got = &fam.vectors()[k - 1];
                assert!(
                    max_abs_diff(got, &oracle[k - 1]) <= 1e-12,
                    "m={m} i={i} k={k}"
                );
                let closed = closed_form_vector(m, i, k).unwrap();
                assert!(max_abs_diff(got, &closed) <= 1e-12, "m={m} i={i} k={k}");
            }
        }
    }
}

#[test]
fn alpha_beta_relations() {
    // β_k = k α_k, and each a_ik has unit norm: k α_k² + β_k² = 1.
    for k in 1..40 {
        let (a, b) = closed_form_coefficients(k);
        assert!((b - k as f64 * a).abs() < 1e-14);
        assert!((k as f64 * a * a + b * b - 1.0).abs() < 1e-14);
    }
}

#[test]
fn spanning_family_is_redundant() {
    for m in [2, 4, 6, 8, 10, 12] {
        let fam = VectorFamily::gram_schmidt_spanning_family(m).unwrap();
        assert_eq!(fam.len(), m * (m + 1));
        let rank = spanning_rank(&fam);
        assert_eq!(rank, symmetric_dimension(m));
        assert!(rank < fam.len());
    }
}

#[test]
fn m2_classical_bound_regression() {
    // Frozen from the exhaustive two-party oracle: 2 + 2√2.
    let h = build_self_testing_matrix(2, true).unwrap();
    let oracle = brute_force_local_bound(&h);
    assert!((oracle - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    assert!((classical_bound(&h).unwrap() - 4.82842712474619).abs() < 1e-12);
}

#[test]
fn m2_moment_matrix_fixture() {
    let h = build_self_testing_matrix(2, true).unwrap();
    let mm = build_moment_matrix(&h).unwrap();
    let want = [0.0, 0.0, 0.5, -0.5, 0.5, -0.5];
    let got: Vec<f64> = mm.entries().column(0).iter().copied().collect();
    assert!(max_abs_diff(&got, &want) < 1e-15, "{got:?}");
}

#[test]
fn m2_and_m4_omit_identity_keeps_rank_and_m2_blocks_share_columns() {
    for m in [2, 4] {
        let h = build_self_testing_matrix(m, false).unwrap();
        assert!(
            rank_criterion(&h, DEFAULT_RANK_THRESHOLD)
                .unwrap()
                .rank_passes
        );
    }
    let h = build_self_testing_matrix(2, true).unwrap();
    let cols = h.columns();
    for c in &cols[4..6] {
        let matched = cols[2..4].iter().any(|d| {
            max_abs_diff(c, d) < 1e-15
                || max_abs_diff(c, &d.iter().map(|x| -x).collect::<Vec<_>>()) < 1e-15
        });
        assert!(matched);
    }
}
