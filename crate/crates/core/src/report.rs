//! Certification and verification reports emitted by the `rocn` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rocn::{
    classical_bound, quantum_bound, MatrixFile, ValidationOutcome, MAX_ENUMERATION_M,
};
use crate::selftest::{kernel_witness_check, rank_criterion, spanning_criterion};
use crate::strategy::{diagnose_capped, StrategyDiagnostics};

pub const TOOL_VERSION: &str = concat!("rocn-core ", env!("CARGO_PKG_VERSION"));

pub const ORIENTATION_NOTE: &str =
    "moment matrix M has one row per column j of h and one column per \
     pair i<k of rows of h, M[j,(i,k)] = h_ij*h_kj; full column rank is m(m-1)/2";

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const NOT_ROCN: i32 = 3;
    pub const VERIFICATION: i32 = 4;
}

/// Maps a library error onto the CLI exit-code contract.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotRocn { .. } => exit::NOT_ROCN,
        Error::BoundNotAttained { .. } => exit::VERIFICATION,
        _ => exit::INPUT,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessSummary {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub norm: f64,
    pub check: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictSummary {
    pub rank_m: usize,
    pub rank_required: usize,
    pub rank_passes: bool,
    pub counting_ok: bool,
    pub threshold: f64,
    pub smallest_retained_singular_value: Option<f64>,
    pub witness: Option<WitnessSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificationReport {
    pub matrix_label: String,
    pub m: usize,
    pub n: usize,
    pub rocn: ValidationOutcome,
    pub classical_bound: Option<f64>,
    pub quantum_bound: Option<f64>,
    pub violation_ratio: Option<f64>,
    pub rank_verdict: Option<VerdictSummary>,
    pub spanning: Option<bool>,
    pub canonical_bell_value: Option<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub tool_version: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub tolerance: f64,
    pub rank_threshold: f64,
    pub max_m: usize,
}

/// Runs every check that applies to `file`. Invalid ROCN input yields a
/// report holding only the validation outcome.
pub fn certify(file: &MatrixFile, options: CertifyOptions) -> Result<CertificationReport> {
    let rocn = file.validate(options.tolerance)?;
    let mut report = CertificationReport {
        matrix_label: file.label.clone(),
        m: file.m,
        n: file.n,
        rocn: rocn.clone(),
        classical_bound: None,
        quantum_bound: None,
        violation_ratio: None,
        rank_verdict: None,
        spanning: None,
        canonical_bell_value: None,
        residuals: BTreeMap::new(),
        notes: vec![ORIENTATION_NOTE.to_string()],
        tool_version: TOOL_VERSION.to_string(),
    };
    report.residuals.insert(
        "rocn_row_orthogonality".into(),
        rocn.worst_row_pair_residual,
    );
    report.residuals.insert(
        "rocn_column_normalization".into(),
        rocn.worst_column_residual,
    );
    if !rocn.valid {
        report
            .notes
            .push("matrix is not ROCN; remaining checks skipped".into());
        return Ok(report);
    }

    let h = file.clone().into_rocn(options.tolerance)?;
    let quantum = quantum_bound(&h);
    report.quantum_bound = Some(quantum);

    if h.m() <= MAX_ENUMERATION_M {
        let classical = classical_bound(&h)?;
        report.classical_bound = Some(classical);
        report.violation_ratio = Some(quantum / classical);
    } else {
        report.notes.push(format!(
            "classical bound skipped: m exceeds {MAX_ENUMERATION_M}"
        ));
    }

    report.spanning = Some(spanning_criterion(&h));

    match rank_criterion(&h, options.rank_threshold) {
        Ok(verdict) => {
            let witness = match &verdict.witness {
                Some(o) => {
                    let check = kernel_witness_check(&h, o)?;
                    report.residuals.insert("witness_check".into(), check);
                    let dense = o.to_dense();
                    Some(WitnessSummary {
                        re: dense
                            .row_iter()
                            .map(|r| r.iter().map(|z| z.re).collect())
                            .collect(),
                        im: dense
                            .row_iter()
                            .map(|r| r.iter().map(|z| z.im).collect())
                            .collect(),
                        norm: o.norm(),
                        check,
                    })
                }
                None => None,
            };
            report.rank_verdict = Some(VerdictSummary {
                rank_m: verdict.rank_m,
                rank_required: verdict.rank_required,
                rank_passes: verdict.rank_passes,
                counting_ok: verdict.counting_ok,
                threshold: options.rank_threshold,
                smallest_retained_singular_value: verdict.smallest_retained_singular_value,
                witness,
            });
        }
        Err(Error::OddM(m)) => report
            .notes
            .push(format!("rank criterion not evaluated: m = {m} is odd")),
        Err(e) => return Err(e),
    }

    match diagnose_capped(&h, options.max_m) {
        Ok(diag) => {
            report.canonical_bell_value = Some(diag.bell_value);
            for (name, value) in diag.residuals() {
                report.residuals.insert(format!("strategy_{name}"), value);
            }
        }
        Err(Error::OutOfRange { max, .. }) => report
            .notes
            .push(format!("canonical strategy skipped: m outside 2..={max}")),
        Err(e) => return Err(e),
    }

    Ok(report)
}

/// Shortest round-trip rendering, switching to exponent form for tiny values.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(v: &Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), num)
}

impl CertificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Plain-text rendering; numbers use the same shortest round-trip
    /// formatting as the JSON output.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "matrix: {} ({} x {})", self.matrix_label, self.m, self.n);
        let _ = writeln!(s, "rocn valid: {}", self.rocn.valid);
        let _ = writeln!(s, "classical bound: {}", opt(&self.classical_bound));
        let _ = writeln!(s, "quantum bound: {}", opt(&self.quantum_bound));
        let _ = writeln!(s, "violation ratio: {}", opt(&self.violation_ratio));
        match &self.rank_verdict {
            Some(v) => {
                let _ = writeln!(
                    s,
                    "rank criterion: rank {} of {} required, passes {}, counting {}",
                    v.rank_m, v.rank_required, v.rank_passes, v.counting_ok
                );
                let _ = writeln!(
                    s,
                    "smallest retained singular value: {}",
                    opt(&v.smallest_retained_singular_value)
                );
                if let Some(w) = &v.witness {
                    let _ = writeln!(
                        s,
                        "kernel witness: norm {}, check {}",
                        num(w.norm),
                        num(w.check)
                    );
                }
            }
            None => {
                let _ = writeln!(s, "rank criterion: n/a");
            }
        }
        let _ = writeln!(
            s,
            "spanning: {}",
            self.spanning
                .map_or_else(|| "n/a".to_string(), |b| b.to_string())
        );
        let _ = writeln!(
            s,
            "canonical bell value: {}",
            opt(&self.canonical_bell_value)
        );
        for (name, value) in &self.residuals {
            let _ = writeln!(s, "residual {name}: {}", num(*value));
        }
        for note in &self.notes {
            let _ = writeln!(s, "note: {note}");
        }
        let _ = writeln!(s, "tool version: {}", self.tool_version);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub matrix_label: String,
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub canonical_bell_value: f64,
    pub quantum_bound: f64,
    pub bound_residual: f64,
    pub residuals: BTreeMap<String, f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub tool_version: String,
}

impl VerifyReport {
    pub fn new(
        label: &str,
        m: usize,
        n: usize,
        diag: &StrategyDiagnostics,
        tolerance: f64,
    ) -> Self {
        let residuals: BTreeMap<String, f64> = diag
            .residuals()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self {
            matrix_label: label.to_string(),
            m,
            n,
            d: diag.d,
            canonical_bell_value: diag.bell_value,
            quantum_bound: n as f64,
            bound_residual: diag.bound_residual,
            passed: diag.worst() <= tolerance,
            residuals,
            tolerance,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "matrix: {} ({} x {}), d = {}",
            self.matrix_label, self.m, self.n, self.d
        );
        let _ = writeln!(
            s,
            "canonical bell value: {}",
            num(self.canonical_bell_value)
        );
        let _ = writeln!(s, "quantum bound: {}", num(self.quantum_bound));
        let _ = writeln!(s, "|value - n|: {}", num(self.bound_residual));
        for (name, value) in &self.residuals {
            let _ = writeln!(s, "residual {name}: {}", num(*value));
        }
        let _ = writeln!(s, "tolerance: {}", num(self.tolerance));
        let _ = writeln!(s, "passed: {}", self.passed);
        let _ = writeln!(s, "tool version: {}", self.tool_version);
        s
    }
}
