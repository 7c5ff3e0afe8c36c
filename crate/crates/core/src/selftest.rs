//! Self-testing criteria for ROCN Bell functionals with even `m`.
//!
//! Two deciders are provided:
//!
//! * the rank criterion: the moment matrix `M` with rows indexed by Bob's
//!   settings `j` and columns by pairs `i < k` of Alice's settings,
//!   `M[j, (i,k)] = h_ij · h_kj`, must have full column rank `m(m-1)/2`;
//! * the spanning criterion: the columns of `h` form a symmetric spanning
//!   set. It is sufficient, not necessary (CHSH passes the rank test but
//!   has only two columns).
//!
//! When the rank test fails, the kernel of `M` yields a null-diagonal
//! symmetric `O` with `⟨h_j|⊗⟨h_j| ψ_O = 0` for every column, which
//! witnesses the failure.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rocn::{RocnMatrix, DEFAULT_TOLERANCE};
use crate::symspan::{self, SymCoefficients, VectorFamily};

/// Default relative cutoff: singular values `≤ 1e-9 · σ_max` count as zero.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-9;

/// Moment matrix, `n × m(m-1)/2`, with pairs in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    m: usize,
    entries: DMatrix<f64>,
    pairs: Vec<(usize, usize)>,
}

impl MomentMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// 0-based pairs `(i, k)`, `i < k`, in column order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    /// Column position of the 0-based pair `(i, k)`, `i < k`.
    pub fn pair_index(&self, i: usize, k: usize) -> Option<usize> {
        pair_position(self.m, i, k)
    }
}

fn pair_position(m: usize, i: usize, k: usize) -> Option<usize> {
    (i < k && k < m).then(|| i * (2 * m - i - 1) / 2 + (k - i - 1))
}

pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

fn require_even(m: usize) -> Result<()> {
    if m % 2 == 1 {
        Err(Error::OddM(m))
    } else {
        Ok(())
    }
}

pub fn build_moment_matrix(h: &RocnMatrix) -> Result<MomentMatrix> {
    let m = h.m();
    require_even(m)?;
    let pairs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| ((i + 1)..m).map(move |k| (i, k)))
        .collect();
    let entries = DMatrix::from_fn(h.n(), pairs.len(), |j, c| {
        let (i, k) = pairs[c];
        h.get(i, j) * h.get(k, j)
    });
    Ok(MomentMatrix { m, entries, pairs })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfTestVerdict {
    pub rank_m: usize,
    pub rank_required: usize,
    pub rank_passes: bool,
    pub spanning_passes: bool,
    /// `n > m(m-1)/2`.
    pub counting_ok: bool,
    /// `None` when no singular value survives the cutoff.
    pub smallest_retained_singular_value: Option<f64>,
    pub singular_values: Vec<f64>,
    /// Unit-norm null-diagonal kernel element, present when the rank test fails.
    pub witness: Option<SymCoefficients>,
}

/// Rank test on the moment matrix with relative cutoff `threshold · σ_max`.
pub fn rank_criterion(h: &RocnMatrix, threshold: f64) -> Result<SelfTestVerdict> {
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(Error::Tolerance(threshold));
    }
    let moments = build_moment_matrix(h)?;
    let m = h.m();
    let required = pair_count(m);
    let sv = linalg::singular_values(moments.entries());
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let cutoff = threshold * sigma_max;
    let rank = if sigma_max > 0.0 {
        linalg::rank_above(&sv, cutoff)
    } else {
        0
    };
    let smallest = sv
        .iter()
        .copied()
        .filter(|&s| s > cutoff && s > 0.0)
        .reduce(f64::min);
    let rank_passes = rank == required;

    let witness = (!rank_passes).then(|| {
        let (_, v) = linalg::smallest_right_singular_vector(moments.entries());
        witness_from_pairs(m, moments.pairs(), v.as_slice())
    });

    Ok(SelfTestVerdict {
        rank_m: rank,
        rank_required: required,
        rank_passes,
        spanning_passes: spanning_criterion(h),
        counting_ok: h.n() > required,
        smallest_retained_singular_value: smallest,
        singular_values: sv,
        witness,
    })
}

/// Null-diagonal `O` with `O_ik = O_ki = v_(i,k)/√2`, so `‖O‖ = ‖v‖`.
fn witness_from_pairs(m: usize, pairs: &[(usize, usize)], v: &[f64]) -> SymCoefficients {
    let mut o = SymCoefficients::zeros(m);
    for (&(i, k), &x) in pairs.iter().zip(v) {
        o.set(
            i,
            k,
            Complex64::new(x * std::f64::consts::FRAC_1_SQRT_2, 0.0),
        );
    }
    o
}

/// Whether the columns of `h` form a symmetric spanning set.
pub fn spanning_criterion(h: &RocnMatrix) -> bool {
    let family =
        VectorFamily::from_columns(h.columns(), h.m()).expect("ROCN columns are unit vectors");
    symspan::is_symmetric_spanning(&family)
}

/// `max_j |Σ_ik h_ij h_kj O_ik|` for a null-diagonal symmetric `O`.
pub fn kernel_witness_check(h: &RocnMatrix, o: &SymCoefficients) -> Result<f64> {
    let m = h.m();
    if o.m() != m {
        return Err(Error::Dimension(format!(
            "witness has dimension {}, matrix has m = {m}",
            o.m()
        )));
    }
    let (index, value) = o.max_diagonal();
    if value > DEFAULT_TOLERANCE {
        return Err(Error::NonNullDiagonal { index, value });
    }
    let mut worst = 0.0f64;
    for j in 0..h.n() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..m {
            for k in 0..m {
                acc += o.get(i, k) * (h.get(i, j) * h.get(k, j));
            }
        }
        worst = worst.max(acc.norm());
    }
    Ok(worst)
}
