//! Two-fold symmetric tensors and symmetric spanning sets.
//!
//! A vector of the symmetric subspace `S(C^m ⊗ C^m)` is stored as its
//! symmetric coefficient matrix `O`, so that `ψ = Σ_ik O_ik |i⟩⊗|k⟩`.
//! A family `{v}` is a symmetric spanning set when the products `v ⊗ v`
//! span the whole `m(m+1)/2`-dimensional subspace.
//!
//! Indices `i` and `k` in the Gram–Schmidt API are 1-based, matching the
//! `a_{i,k}` labels; everything else is 0-based.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rocn::DEFAULT_TOLERANCE;

/// Relative factor in the spanning-rank cutoff `max(rows, cols) · σ_max · factor`.
pub const DEFAULT_SPAN_RANK_FACTOR: f64 = 1e-12;

/// Dimension of the two-fold symmetric subspace over `C^m`.
pub fn symmetric_dimension(m: usize) -> usize {
    m * (m + 1) / 2
}

/// Symmetric `m × m` coefficient matrix; only the upper triangle (with the
/// diagonal) is stored, so `O_ik = O_ki` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymCoefficients {
    m: usize,
    packed: Vec<Complex64>,
}

impl SymCoefficients {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            packed: vec![Complex64::new(0.0, 0.0); symmetric_dimension(m)],
        }
    }

    /// Builds `O` from a function evaluated on `i ≤ k`.
    pub fn from_upper(m: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut packed = Vec::with_capacity(symmetric_dimension(m));
        for i in 0..m {
            for k in i..m {
                packed.push(f(i, k));
            }
        }
        Self { m, packed }
    }

    fn slot(&self, i: usize, k: usize) -> usize {
        let (i, k) = if i <= k { (i, k) } else { (k, i) };
        assert!(
            k < self.m,
            "index ({i}, {k}) out of range for m = {}",
            self.m
        );
        // rows 0..i hold m, m-1, …, m-i+1 entries
        i * self.m - i * i.saturating_sub(1) / 2 + (k - i)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.packed[self.slot(i, k)]
    }

    /// Sets both `O_ik` and `O_ki`.
    pub fn set(&mut self, i: usize, k: usize, value: Complex64) {
        let s = self.slot(i, k);
        self.packed[s] = value;
    }

    /// Largest diagonal magnitude, with its index.
    pub fn max_diagonal(&self) -> (usize, f64) {
        (0..self.m)
            .map(|i| (i, self.get(i, i).norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc })
    }

    pub fn is_null_diagonal(&self, tolerance: f64) -> bool {
        self.max_diagonal().1 <= tolerance
    }

    /// Euclidean norm of the tensor `ψ`, i.e. the Frobenius norm of `O`.
    pub fn norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.m {
            for k in i..self.m {
                let w = if i == k { 1.0 } else { 2.0 };
                sum += w * self.get(i, k).norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.m, self.m, |i, k| self.get(i, k))
    }

    /// Largest entrywise difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.m, other.m);
        self.packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Real coordinates in an orthonormal basis of the symmetric subspace:
    /// `O_ii` for the diagonal and `√2·O_ik` for `i < k`. Only the real part
    /// is used; callers pass families of real vectors.
    pub fn real_coordinates(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.packed.len());
        for i in 0..self.m {
            for k in i..self.m {
                let w = if i == k {
                    1.0
                } else {
                    std::f64::consts::SQRT_2
                };
                out.push(w * self.get(i, k).re);
            }
        }
        out
    }
}

impl Add for &SymCoefficients {
    type Output = SymCoefficients;

    fn add(self, rhs: Self) -> SymCoefficients {
        assert_eq!(self.m, rhs.m);
        SymCoefficients {
            m: self.m,
            packed: self
                .packed
                .iter()
                .zip(&rhs.packed)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &SymCoefficients {
    type Output = SymCoefficients;

    fn sub(self, rhs: Self) -> SymCoefficients {
        assert_eq!(self.m, rhs.m);
        SymCoefficients {
            m: self.m,
            packed: self
                .packed
                .iter()
                .zip(&rhs.packed)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul<f64> for &SymCoefficients {
    type Output = SymCoefficients;

    fn mul(self, rhs: f64) -> SymCoefficients {
        SymCoefficients {
            m: self.m,
            packed: self.packed.iter().map(|a| a * rhs).collect(),
        }
    }
}

/// `S(u ⊗ v) = (u⊗v + v⊗u)/2`, i.e. `O_ik = (u_i v_k + u_k v_i)/2`.
pub fn symmetrize(u: &[f64], v: &[f64]) -> Result<SymCoefficients> {
    if u.len() != v.len() {
        return Err(Error::Dimension(format!(
            "cannot symmetrize vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    Ok(SymCoefficients::from_upper(u.len(), |i, k| {
        Complex64::new(0.5 * (u[i] * v[k] + u[k] * v[i]), 0.0)
    }))
}

/// An ordered family of real unit vectors in `R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFamily {
    m: usize,
    vectors: Vec<Vec<f64>>,
    labels: Vec<String>,
}

impl VectorFamily {
    pub fn new(m: usize, vectors: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if vectors.len() != labels.len() {
            return Err(Error::Dimension(format!(
                "{} vectors but {} labels",
                vectors.len(),
                labels.len()
            )));
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != m {
                return Err(Error::Dimension(format!(
                    "vector {index} has length {}, expected {m}",
                    v.len()
                )));
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > DEFAULT_TOLERANCE {
                return Err(Error::NotUnit { index, norm });
            }
        }
        Ok(Self { m, vectors, labels })
    }

    /// `e_1, …, e_m`.
    pub fn standard_basis(m: usize) -> Self {
        let vectors = (0..m)
            .map(|i| (0..m).map(|r| if r == i { 1.0 } else { 0.0 }).collect())
            .collect();
        let labels = (1..=m).map(|i| format!("e_{i}")).collect();
        Self { m, vectors, labels }
    }

    /// The columns of an `m × n` matrix, labelled `h_j`.
    pub fn from_columns(columns: Vec<Vec<f64>>, m: usize) -> Result<Self> {
        let labels = (1..=columns.len()).map(|j| format!("h_{j}")).collect();
        Self::new(m, columns, labels)
    }

    /// `{e_i} ∪ {a_ik : 1 ≤ i, k ≤ m}`, the `m(m+1)`-member spanning family.
    pub fn gram_schmidt_spanning_family(m: usize) -> Result<Self> {
        let mut family = Self::standard_basis(m);
        for i in 1..=m {
            family.extend(gram_schmidt_family(m, i)?);
        }
        Ok(family)
    }

    pub fn extend(&mut self, other: VectorFamily) {
        assert_eq!(self.m, other.m, "families live in different dimensions");
        self.vectors.extend(other.vectors);
        self.labels.extend(other.labels);
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rows are the symmetric coordinates of `v ⊗ v` for each member.
    pub fn product_coordinates(&self) -> DMatrix<f64> {
        let dim = symmetric_dimension(self.m);
        let mut out = DMatrix::zeros(self.len(), dim);
        for (r, v) in self.vectors.iter().enumerate() {
            let coords = symmetrize(v, v).expect("same length").real_coordinates();
            for (c, x) in coords.into_iter().enumerate() {
                out[(r, c)] = x;
            }
        }
        out
    }
}

/// Rank of `span{v ⊗ v}` with the default cutoff.
pub fn spanning_rank(family: &VectorFamily) -> usize {
    spanning_rank_with(family, DEFAULT_SPAN_RANK_FACTOR)
}

/// Rank of `span{v ⊗ v}`; singular values at or below
/// `max(rows, cols) · σ_max · factor` count as zero.
pub fn spanning_rank_with(family: &VectorFamily, factor: f64) -> usize {
    if family.is_empty() {
        return 0;
    }
    let coords = family.product_coordinates();
    let sv = linalg::singular_values(&coords);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let cutoff = coords.nrows().max(coords.ncols()) as f64 * sigma_max * factor;
    linalg::rank_above(&sv, cutoff)
}

pub fn is_symmetric_spanning(family: &VectorFamily) -> bool {
    spanning_rank(family) == symmetric_dimension(family.m())
}

/// 0-based `i ⊕ k` on `{0, …, m-1}`.
pub(crate) fn cyclic(m: usize, i: usize, k: usize) -> usize {
    (i + k) % m
}

/// Orthonormal basis `{a_i1, …, a_im}` of `R^m` obtained by Gram–Schmidt on
/// `[(e_i + e_{i⊕1})/√2, …, (e_i + e_{i⊕(m-1)})/√2, e_i]`.
///
/// `i` is 1-based. Signs are fixed so the coefficient of `e_{i⊕k}` is
/// positive for `k < m` and the coefficient of `e_i` is positive for `k = m`.
pub fn gram_schmidt_family(m: usize, i: usize) -> Result<VectorFamily> {
    if m < 2 {
        return Err(Error::OutOfRange {
            m,
            min: 2,
            max: usize::MAX,
        });
    }
    if i == 0 || i > m {
        return Err(Error::Index { index: i, max: m });
    }
    let base = i - 1;
    // The 1/√2 input scaling does not change the output, so the inputs are
    // taken unscaled and normalization is deferred to the end: with
    // integer inputs the m = 2 blocks then come out bit-exact.
    let mut inputs: Vec<Vec<f64>> = (1..m)
        .map(|k| {
            let mut v = vec![0.0; m];
            v[base] = 1.0;
            v[cyclic(m, base, k)] = 1.0;
            v
        })
        .collect();
    let mut last = vec![0.0; m];
    last[base] = 1.0;
    inputs.push(last);

    // Modified Gram–Schmidt on unnormalized directions.
    let mut directions: Vec<(Vec<f64>, f64)> = Vec::with_capacity(m);
    for mut v in inputs {
        for (u, norm_sq) in &directions {
            let coeff = u.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>() / norm_sq;
            for (x, y) in v.iter_mut().zip(u) {
                *x -= coeff * y;
            }
        }
        let norm_sq = v.iter().map(|x| x * x).sum::<f64>();
        directions.push((v, norm_sq));
    }

    let basis = directions
        .into_iter()
        .enumerate()
        .map(|(k, (mut v, norm_sq))| {
            let scale = (1.0 / norm_sq).sqrt();
            let pivot = if k + 1 < m {
                cyclic(m, base, k + 1)
            } else {
                base
            };
            let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
            v.iter_mut().for_each(|x| *x *= sign * scale);
            v
        })
        .collect();
    let labels = (1..=m).map(|k| format!("a_{{{i},{k}}}")).collect();
    Ok(VectorFamily {
        m,
        vectors: basis,
        labels,
    })
}

/// `(α_k, β_k) = (1/√(k + k²), √(k/(1 + k)))`.
pub fn closed_form_coefficients(k: usize) -> (f64, f64) {
    assert!(k >= 1, "k must be at least 1");
    let k = k as f64;
    (1.0 / (k + k * k).sqrt(), (k / (1.0 + k)).sqrt())
}

/// Closed-form `a_ik` (1-based `i`, `k`).
///
/// For `k < m` this is `α_k (e_i − Σ_{j<k} e_{i⊕j}) + β_k e_{i⊕k}`; for
/// `k = m` it is the unit completion `(e_i − Σ_{j<m} e_{i⊕j})/√m`.
pub fn closed_form_vector(m: usize, i: usize, k: usize) -> Result<Vec<f64>> {
    if i == 0 || i > m {
        return Err(Error::Index { index: i, max: m });
    }
    if k == 0 || k > m {
        return Err(Error::Index { index: k, max: m });
    }
    let base = i - 1;
    let mut v = vec![0.0; m];
    if k == m {
        let c = 1.0 / (m as f64).sqrt();
        v.iter_mut().for_each(|x| *x = -c);
        v[base] = c;
        return Ok(v);
    }
    let (alpha, beta) = closed_form_coefficients(k);
    v[base] = alpha;
    for j in 1..k {
        v[cyclic(m, base, j)] = -alpha;
    }
    v[cyclic(m, base, k)] = beta;
    Ok(v)
}
