#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use rocn_core::RocnMatrix;

/// Haar-ish random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(m: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..m {
        if r[(c, c)] < 0.0 {
            q.column_mut(c).neg_mut();
        }
    }
    q
}

/// Concatenation of `blocks` random orthogonal `m × m` blocks.
pub fn random_block_rocn<R: Rng>(m: usize, blocks: usize, rng: &mut R) -> RocnMatrix {
    let mut h = DMatrix::zeros(m, m * blocks);
    for b in 0..blocks {
        let o = random_orthogonal(m, rng);
        h.view_mut((0, b * m), (m, m)).copy_from(&o);
    }
    RocnMatrix::from_matrix(h, Some(format!("random;m={m};blocks={blocks}")), 1e-9).unwrap()
}

/// Exhaustive local bound over every deterministic assignment of both
/// parties, `max_{a,b} Σ_ij h_ij a_i b_j`. Exponential in `m + n`.
pub fn brute_force_local_bound(h: &RocnMatrix) -> f64 {
    let (m, n) = (h.m(), h.n());
    assert!(m + n <= 22, "oracle is only meant for small matrices");
    let mut best = f64::NEG_INFINITY;
    for a_bits in 0u32..(1 << m) {
        for b_bits in 0u32..(1 << n) {
            let mut value = 0.0;
            for i in 0..m {
                let a = if a_bits >> i & 1 == 1 { -1.0 } else { 1.0 };
                for j in 0..n {
                    let b = if b_bits >> j & 1 == 1 { -1.0 } else { 1.0 };
                    value += h.get(i, j) * a * b;
                }
            }
            best = best.max(value);
        }
    }
    best
}

/// Classical Gram–Schmidt on the ordered list
/// `[(e_i + e_{i⊕1})/√2, …, (e_i + e_{i⊕(m-1)})/√2, e_i]` (0-based `i`),
/// without any sign normalization.
pub fn classical_gram_schmidt(m: usize, i: usize) -> Vec<Vec<f64>> {
    let mut inputs = Vec::new();
    for k in 1..m {
        let mut v = vec![0.0; m];
        v[i] += 1.0 / 2f64.sqrt();
        v[(i + k) % m] += 1.0 / 2f64.sqrt();
        inputs.push(v);
    }
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    inputs.push(e);

    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in inputs {
        let coeffs: Vec<f64> = out
            .iter()
            .map(|q| q.iter().zip(&v).map(|(a, b)| a * b).sum())
            .collect();
        let mut w = v.clone();
        for (q, c) in out.iter().zip(coeffs) {
            for (x, y) in w.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.push(w.into_iter().map(|x| x / norm).collect());
    }
    out
}

pub fn identity(m: usize) -> RocnMatrix {
    RocnMatrix::from_matrix(
        DMatrix::identity(m, m),
        Some(format!("identity;m={m}")),
        1e-9,
    )
    .unwrap()
}

pub fn chsh() -> RocnMatrix {
    rocn_core::preset(rocn_core::Preset::Chsh)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
