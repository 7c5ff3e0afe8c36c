//! Row-orthogonal, column-normalized (ROCN) coefficient matrices.
//!
//! A real `m × n` matrix `h` defines the correlation-type Bell functional
//! `I_h = Σ_ij h_ij ⟨A_i B_j⟩`. It is ROCN when its rows are pairwise
//! orthogonal (rows need not share a norm) and every column has unit
//! Euclidean norm. For such matrices the quantum bound is exactly `n`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

/// Default absolute tolerance for the ROCN identities.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest `m` accepted by the exhaustive classical-bound search.
pub const MAX_ENUMERATION_M: usize = 24;

/// Rows fixed to +1 by the inner Gray-code walk; the outer loop re-seeds the
/// column sums exactly so rounding drift stays bounded.
const GRAY_BLOCK_BITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub valid: bool,
    pub worst_row_pair_residual: f64,
    pub worst_column_residual: f64,
    pub zero_rows: Vec<usize>,
}

fn check_tolerance(tolerance: f64) -> Result<()> {
    if tolerance.is_finite() && tolerance > 0.0 {
        Ok(())
    } else {
        Err(Error::Tolerance(tolerance))
    }
}

fn check_shape(rows: &[Vec<f64>]) -> Result<(usize, usize)> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::Dimension("matrix has no rows".into()));
    }
    let n = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Dimension(format!(
                "row {i} has length {}, expected {n}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { row: i, col: j });
        }
    }
    if m > n {
        return Err(Error::Dimension(format!("m = {m} exceeds n = {n}")));
    }
    Ok((m, n))
}

/// Checks the two ROCN identities and the nonzero-row condition.
///
/// Residuals are the maximum absolute deviations: `|Σ_j h_ij h_kj|` over
/// `i ≠ k` and `|Σ_i h_ij² − 1|` over columns.
pub fn validate_rocn(rows: &[Vec<f64>], tolerance: f64) -> Result<ValidationOutcome> {
    check_tolerance(tolerance)?;
    let (m, n) = check_shape(rows)?;

    let mut worst_row = 0.0f64;
    for i in 0..m {
        for k in (i + 1)..m {
            let dot: f64 = rows[i].iter().zip(&rows[k]).map(|(a, b)| a * b).sum();
            worst_row = worst_row.max(dot.abs());
        }
    }

    let mut worst_col = 0.0f64;
    for j in 0..n {
        let norm_sq: f64 = rows.iter().map(|r| r[j] * r[j]).sum();
        worst_col = worst_col.max((norm_sq - 1.0).abs());
    }

    let zero_rows: Vec<usize> = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.iter().all(|x| x.abs() <= tolerance))
        .map(|(i, _)| i)
        .collect();

    Ok(ValidationOutcome {
        valid: worst_row <= tolerance && worst_col <= tolerance && zero_rows.is_empty(),
        worst_row_pair_residual: worst_row,
        worst_column_residual: worst_col,
        zero_rows,
    })
}

/// A validated ROCN matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RocnMatrix {
    entries: DMatrix<f64>,
    label: Option<String>,
}

impl RocnMatrix {
    /// Builds a matrix from row-major data, rejecting anything that fails
    /// [`validate_rocn`] at `tolerance`.
    pub fn from_rows(rows: &[Vec<f64>], label: Option<String>, tolerance: f64) -> Result<Self> {
        let outcome = validate_rocn(rows, tolerance)?;
        if !outcome.valid {
            return Err(Error::NotRocn {
                row_residual: outcome.worst_row_pair_residual,
                column_residual: outcome.worst_column_residual,
                zero_rows: outcome.zero_rows,
            });
        }
        let (m, n) = (rows.len(), rows[0].len());
        let entries = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
        Ok(Self { entries, label })
    }

    pub fn from_matrix(
        entries: DMatrix<f64>,
        label: Option<String>,
        tolerance: f64,
    ) -> Result<Self> {
        Self::from_rows(&matrix_rows(&entries), label, tolerance)
    }

    pub fn m(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Column `j` as a vector in `R^m`.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.entries.column(j).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.n()).map(|j| self.column(j)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        matrix_rows(&self.entries)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            m: self.m(),
            n: self.n(),
            entries: self.rows(),
            label: self.label.clone().unwrap_or_default(),
        }
    }

    pub fn to_json(&self) -> String {
        self.to_file().to_json()
    }

    pub fn from_json(text: &str, tolerance: f64) -> Result<Self> {
        MatrixFile::parse(text)?.into_rocn(tolerance)
    }
}

fn matrix_rows(entries: &DMatrix<f64>) -> Vec<Vec<f64>> {
    entries
        .row_iter()
        .map(|r| r.iter().copied().collect())
        .collect()
}

/// On-disk matrix record: `{"m", "n", "entries", "label"}`, row-major.
///
/// Writers emit every entry with 17 significant digits so that reading a
/// file back reproduces the doubles bit for bit.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MatrixFile {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<Vec<f64>>,
    #[serde(default)]
    pub label: String,
}

/// Formats a double with 17 significant digits as a JSON number.
pub fn format_f64_exact(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Serialize)]
struct MatrixFileOut<'a> {
    m: usize,
    n: usize,
    entries: Vec<Vec<Box<RawValue>>>,
    label: &'a str,
}

impl MatrixFile {
    /// Parses and checks the header against the payload. Does not check the
    /// ROCN identities.
    pub fn parse(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.entries.len() != file.m {
            return Err(Error::Format(format!(
                "header says m = {} but {} rows are present",
                file.m,
                file.entries.len()
            )));
        }
        for (i, row) in file.entries.iter().enumerate() {
            if row.len() != file.n {
                return Err(Error::Format(format!(
                    "header says n = {} but row {i} has {} entries",
                    file.n,
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
        if file.m == 0 || file.n == 0 {
            return Err(Error::Format("empty matrix".into()));
        }
        Ok(file)
    }

    pub fn validate(&self, tolerance: f64) -> Result<ValidationOutcome> {
        validate_rocn(&self.entries, tolerance)
    }

    pub fn into_rocn(self, tolerance: f64) -> Result<RocnMatrix> {
        let label = (!self.label.is_empty()).then_some(self.label);
        RocnMatrix::from_rows(&self.entries, label, tolerance)
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| {
                        RawValue::from_string(format_f64_exact(x)).expect("valid JSON number")
                    })
                    .collect()
            })
            .collect();
        let out = MatrixFileOut {
            m: self.m,
            n: self.n,
            entries,
            label: &self.label,
        };
        serde_json::to_string_pretty(&out).expect("matrix serialization")
    }
}

/// Local (classical) bound: the maximum of `I_h` over deterministic ±1
/// assignments.
///
/// Bob is eliminated analytically, so only Alice's `2^(m-1)` sign vectors
/// with `a_1 = +1` are enumerated, each scoring `Σ_j |Σ_i h_ij a_i|`.
pub fn classical_bound(h: &RocnMatrix) -> Result<f64> {
    let m = h.m();
    let n = h.n();
    if m > MAX_ENUMERATION_M {
        return Err(Error::TooLarge {
            m,
            max: MAX_ENUMERATION_M,
        });
    }
    let rows = h.rows();
    let free = m - 1;
    let low = free.min(GRAY_BLOCK_BITS);
    let high = free - low;

    let mut signs = vec![1.0f64; m];
    let mut sums = vec![0.0f64; n];
    let mut best = f64::NEG_INFINITY;
    let score = |sums: &[f64]| sums.iter().map(|s| s.abs()).sum::<f64>();

    for pattern in 0u64..(1u64 << high) {
        signs[..=low].fill(1.0);
        for b in 0..high {
            signs[1 + low + b] = if pattern >> b & 1 == 1 { -1.0 } else { 1.0 };
        }
        for (j, s) in sums.iter_mut().enumerate() {
            *s = rows.iter().zip(&signs).map(|(row, a)| a * row[j]).sum();
        }
        best = best.max(score(&sums));

        for step in 1u64..(1u64 << low) {
            let r = 1 + step.trailing_zeros() as usize;
            let flip = -2.0 * signs[r];
            for (s, x) in sums.iter_mut().zip(&rows[r]) {
                *s += flip * x;
            }
            signs[r] = -signs[r];
            best = best.max(score(&sums));
        }
    }
    Ok(best)
}

/// Quantum bound of an ROCN functional: exactly `n`.
pub fn quantum_bound(h: &RocnMatrix) -> f64 {
    h.n() as f64
}

/// Evaluates `Σ_ij h_ij · c_ij` for a correlation table `c`.
pub fn bell_value(h: &RocnMatrix, correlations: &DMatrix<f64>) -> Result<f64> {
    if correlations.shape() != h.entries().shape() {
        return Err(Error::Dimension(format!(
            "correlations are {:?}, expected {:?}",
            correlations.shape(),
            h.entries().shape()
        )));
    }
    for i in 0..correlations.nrows() {
        for j in 0..correlations.ncols() {
            let c = correlations[(i, j)];
            if !c.is_finite() || c.abs() > 1.0 + DEFAULT_TOLERANCE {
                return Err(Error::OutOfUnitInterval {
                    row: i,
                    col: j,
                    value: c,
                });
            }
        }
    }
    Ok(h.entries().component_mul(correlations).sum())
}
