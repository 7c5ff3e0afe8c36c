//! Canonical quantum strategy for an ROCN functional.
//!
//! Alice measures `m` pairwise anticommuting Hermitian involutions in the
//! Jordan–Wigner representation on `d = 2^⌊m/2⌋` dimensions; Bob measures
//! `B_j = Σ_i h_ij A_iᵀ`; the shared state is `|Φ_d⟩ = Σ_i |ii⟩/√d`.
//!
//! The transpose in Bob's observables is taken in the computational basis
//! in which `|Φ_d⟩` is written. With that convention
//! `⟨Φ_d| A ⊗ B |Φ_d⟩ = Tr(A Bᵀ)/d`, so the joint correlations of the
//! canonical strategy reproduce `h` entry for entry and the Bell value is
//! `Σ_ij h_ij² = n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rocn::{bell_value, quantum_bound, RocnMatrix, DEFAULT_TOLERANCE};

pub type CMatrix = DMatrix<Complex64>;

/// Default upper limit on `m` for strategy synthesis (`d = 64`).
pub const MAX_STRATEGY_M: usize = 12;

/// Largest dimension accepted by the explicit state-vector path.
pub const MAX_EXPLICIT_DIMENSION: usize = 8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let data = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &data)
    }
}

/// Tensor product of single-qubit Paulis, leftmost factor first.
pub fn pauli_string(factors: &[Pauli]) -> CMatrix {
    factors
        .iter()
        .fold(CMatrix::from_element(1, 1, ONE), |acc, p| {
            acc.kronecker(&p.matrix())
        })
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSet {
    pub d: usize,
    pub ops: Vec<CMatrix>,
}

impl ObservableSet {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `max ‖A − A†‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        self.ops
            .iter()
            .map(|a| max_abs(&(a - a.adjoint())))
            .fold(0.0, f64::max)
    }

    /// `max ‖A² − I‖_max`.
    pub fn involution_residual(&self) -> f64 {
        let id = CMatrix::identity(self.d, self.d);
        self.ops
            .iter()
            .map(|a| max_abs(&(a * a - &id)))
            .fold(0.0, f64::max)
    }

    /// `max_{i≠k} ‖A_i A_k + A_k A_i‖_max`.
    pub fn anticommutation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.ops.len() {
            for k in (i + 1)..self.ops.len() {
                let (a, b) = (&self.ops[i], &self.ops[k]);
                worst = worst.max(max_abs(&(a * b + b * a)));
            }
        }
        worst
    }

    /// `max |Tr A|`.
    pub fn trace_residual(&self) -> f64 {
        self.ops
            .iter()
            .map(|a| a.trace().norm())
            .fold(0.0, f64::max)
    }

    /// Matrix of `Tr(A_i A_k)`.
    pub fn trace_gram(&self) -> CMatrix {
        let n = self.ops.len();
        CMatrix::from_fn(n, n, |i, k| (&self.ops[i] * &self.ops[k]).trace())
    }
}

/// Jordan–Wigner generators: for `p = 1..r` (`r = ⌊m/2⌋`),
/// `A_{2p-1} = Z^{⊗(p-1)} ⊗ X ⊗ I^{⊗(r-p)}` and
/// `A_{2p} = Z^{⊗(p-1)} ⊗ Y ⊗ I^{⊗(r-p)}`. Odd `m` appends `Z^{⊗r}`.
pub fn clifford_generators(m: usize) -> Result<ObservableSet> {
    clifford_generators_capped(m, MAX_STRATEGY_M)
}

pub fn clifford_generators_capped(m: usize, max_m: usize) -> Result<ObservableSet> {
    if m < 2 || m > max_m {
        return Err(Error::OutOfRange {
            m,
            min: 2,
            max: max_m,
        });
    }
    let r = m / 2;
    let mut ops = Vec::with_capacity(m);
    for p in 0..r {
        for site in [Pauli::X, Pauli::Y] {
            let factors: Vec<Pauli> = (0..r)
                .map(|q| match q.cmp(&p) {
                    std::cmp::Ordering::Less => Pauli::Z,
                    std::cmp::Ordering::Equal => site,
                    std::cmp::Ordering::Greater => Pauli::I,
                })
                .collect();
            ops.push(pauli_string(&factors));
        }
    }
    if m % 2 == 1 {
        ops.push(pauli_string(&vec![Pauli::Z; r]));
    }
    Ok(ObservableSet { d: 1 << r, ops })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateForm {
    MaximallyEntangled { d: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    pub d: usize,
    pub alice: ObservableSet,
    pub bob: ObservableSet,
    pub state_form: StateForm,
}

/// Alice gets the Jordan–Wigner generators, Bob gets `B_j = Σ_i h_ij A_iᵀ`.
pub fn canonical_strategy(h: &RocnMatrix) -> Result<QuantumStrategy> {
    canonical_strategy_capped(h, MAX_STRATEGY_M)
}

pub fn canonical_strategy_capped(h: &RocnMatrix, max_m: usize) -> Result<QuantumStrategy> {
    let alice = clifford_generators_capped(h.m(), max_m)?;
    let d = alice.d;
    let transposed: Vec<CMatrix> = alice.ops.iter().map(|a| a.transpose()).collect();
    let bob = (0..h.n())
        .map(|j| {
            transposed
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(d, d), |acc, (i, at)| {
                    acc + at * Complex64::new(h.get(i, j), 0.0)
                })
        })
        .collect();
    Ok(QuantumStrategy {
        d,
        alice,
        bob: ObservableSet { d, ops: bob },
        state_form: StateForm::MaximallyEntangled { d },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTable {
    pub m: usize,
    pub n: usize,
    pub mean_a: Vec<f64>,
    pub mean_b: Vec<f64>,
    pub joint: DMatrix<f64>,
}

/// `Σ_ab A_ab B_ab = Tr(A Bᵀ)`.
fn trace_with_transpose(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Correlations on `|Φ_d⟩` via the trace identity:
/// `⟨A⟩ = Tr A / d`, `⟨B⟩ = Tr B / d`, `⟨A B⟩ = Tr(A Bᵀ)/d`.
pub fn correlations(strategy: &QuantumStrategy) -> CorrelationTable {
    let d = strategy.d as f64;
    let alice = &strategy.alice.ops;
    let bob = &strategy.bob.ops;
    CorrelationTable {
        m: alice.len(),
        n: bob.len(),
        mean_a: alice.iter().map(|a| a.trace().re / d).collect(),
        mean_b: bob.iter().map(|b| b.trace().re / d).collect(),
        joint: DMatrix::from_fn(alice.len(), bob.len(), |i, j| {
            trace_with_transpose(&alice[i], &bob[j]).re / d
        }),
    }
}

/// `|Φ_d⟩` in the basis `|a⟩⊗|b⟩ ↦ index a·d + b`.
pub fn maximally_entangled_state(d: usize) -> DVector<Complex64> {
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut psi = DVector::zeros(d * d);
    for i in 0..d {
        psi[i * d + i] = amp;
    }
    psi
}

/// Same table as [`correlations`], computed as `⟨Φ_d| A ⊗ B |Φ_d⟩` with
/// the full `d² × d²` operators. Only for `d ≤ MAX_EXPLICIT_DIMENSION`.
pub fn correlations_via_state(strategy: &QuantumStrategy) -> Result<CorrelationTable> {
    let d = strategy.d;
    if d > MAX_EXPLICIT_DIMENSION {
        return Err(Error::Dimension(format!(
            "explicit state path supports d ≤ {MAX_EXPLICIT_DIMENSION}, got {d}"
        )));
    }
    let psi = maximally_entangled_state(d);
    let id = CMatrix::identity(d, d);
    let expect = |op: CMatrix| psi.dotc(&(op * &psi)).re;
    let alice = &strategy.alice.ops;
    let bob = &strategy.bob.ops;
    Ok(CorrelationTable {
        m: alice.len(),
        n: bob.len(),
        mean_a: alice.iter().map(|a| expect(a.kronecker(&id))).collect(),
        mean_b: bob.iter().map(|b| expect(id.kronecker(b))).collect(),
        joint: DMatrix::from_fn(alice.len(), bob.len(), |i, j| {
            expect(alice[i].kronecker(&bob[j]))
        }),
    })
}

/// Outcome probabilities `p(a, b | i, j)`, stored `[i][j][a][b]` with index
/// 0 for outcome `+1` and index 1 for `−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTensor {
    pub m: usize,
    pub n: usize,
    data: Vec<[[f64; 2]; 2]>,
}

/// Outcome value for a tensor index: `0 ↦ +1`, `1 ↦ −1`.
pub fn outcome(index: usize) -> f64 {
    if index == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ProbabilityTensor {
    pub fn slice(&self, i: usize, j: usize) -> &[[f64; 2]; 2] {
        &self.data[i * self.n + j]
    }

    pub fn get(&self, i: usize, j: usize, a: usize, b: usize) -> f64 {
        self.slice(i, j)[a][b]
    }

    pub fn to_nested(&self) -> Vec<Vec<[[f64; 2]; 2]>> {
        (0..self.m)
            .map(|i| (0..self.n).map(|j| *self.slice(i, j)).collect())
            .collect()
    }

    pub fn min_probability(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_probability(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_ij |Σ_ab p(a,b|i,j) − 1|`.
    pub fn normalization_residual(&self) -> f64 {
        self.data
            .iter()
            .map(|s| (s.iter().flatten().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `⟨A_i B_j⟩ = Σ_ab a·b·p(a,b|i,j)`.
    pub fn joint_correlations(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.n, |i, j| {
            let s = self.slice(i, j);
            let mut acc = 0.0;
            for (a, row) in s.iter().enumerate() {
                for (b, p) in row.iter().enumerate() {
                    acc += outcome(a) * outcome(b) * p;
                }
            }
            acc
        })
    }
}

fn check_unit_interval(values: impl Iterator<Item = (usize, usize, f64)>) -> Result<()> {
    for (row, col, value) in values {
        if !value.is_finite() || value.abs() > 1.0 + DEFAULT_TOLERANCE {
            return Err(Error::OutOfUnitInterval { row, col, value });
        }
    }
    Ok(())
}

/// `p(a,b|i,j) = ¼[1 + a⟨A_i⟩ + b⟨B_j⟩ + ab⟨A_i B_j⟩]`.
pub fn probabilities(table: &CorrelationTable) -> Result<ProbabilityTensor> {
    check_unit_interval(table.mean_a.iter().enumerate().map(|(i, &v)| (i, 0, v)))?;
    check_unit_interval(table.mean_b.iter().enumerate().map(|(j, &v)| (0, j, v)))?;
    check_unit_interval(
        (0..table.m)
            .flat_map(|i| (0..table.n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, table.joint[(i, j)])),
    )?;
    let mut data = Vec::with_capacity(table.m * table.n);
    for i in 0..table.m {
        for j in 0..table.n {
            let mut slice = [[0.0; 2]; 2];
            for (a, row) in slice.iter_mut().enumerate() {
                for (b, p) in row.iter_mut().enumerate() {
                    let (x, y) = (outcome(a), outcome(b));
                    *p = 0.25
                        * (1.0
                            + x * table.mean_a[i]
                            + y * table.mean_b[j]
                            + x * y * table.joint[(i, j)]);
                }
            }
            data.push(slice);
        }
    }
    Ok(ProbabilityTensor {
        m: table.m,
        n: table.n,
        data,
    })
}

/// `|bell_value(h, canonical correlations) − n|`, failing when it exceeds
/// `tolerance`.
pub fn verify_quantum_bound(h: &RocnMatrix, tolerance: f64) -> Result<f64> {
    let strategy = canonical_strategy(h)?;
    let value = bell_value(h, &correlations(&strategy).joint)?;
    let bound = quantum_bound(h);
    let residual = (value - bound).abs();
    if residual > tolerance {
        return Err(Error::BoundNotAttained {
            value,
            bound,
            residual,
        });
    }
    Ok(residual)
}

/// Residuals of every invariant the canonical strategy should satisfy.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyDiagnostics {
    pub d: usize,
    pub bell_value: f64,
    pub bound_residual: f64,
    pub alice_anticommutation: f64,
    pub alice_involution: f64,
    pub alice_hermiticity: f64,
    pub bob_involution: f64,
    pub bob_hermiticity: f64,
    /// `max |⟨A_i B_j⟩ − h_ij|`.
    pub moment_residual: f64,
    pub probability_normalization: f64,
    /// `max(0, −min p)`.
    pub probability_negativity: f64,
    /// `max |Σ ab·p − ⟨A_i B_j⟩|`.
    pub probability_roundtrip: f64,
}

impl StrategyDiagnostics {
    /// Named residuals, in a fixed order.
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("bound", self.bound_residual),
            ("alice_anticommutation", self.alice_anticommutation),
            ("alice_involution", self.alice_involution),
            ("alice_hermiticity", self.alice_hermiticity),
            ("bob_involution", self.bob_involution),
            ("bob_hermiticity", self.bob_hermiticity),
            ("moment", self.moment_residual),
            ("probability_normalization", self.probability_normalization),
            ("probability_negativity", self.probability_negativity),
            ("probability_roundtrip", self.probability_roundtrip),
        ]
    }

    pub fn worst(&self) -> f64 {
        self.residuals()
            .into_iter()
            .map(|(_, r)| r)
            .fold(0.0, f64::max)
    }
}

pub fn diagnose(h: &RocnMatrix) -> Result<StrategyDiagnostics> {
    diagnose_capped(h, MAX_STRATEGY_M)
}

pub fn diagnose_capped(h: &RocnMatrix, max_m: usize) -> Result<StrategyDiagnostics> {
    let strategy = canonical_strategy_capped(h, max_m)?;
    let table = correlations(&strategy);
    let value = bell_value(h, &table.joint)?;
    let probs = probabilities(&table)?;
    Ok(StrategyDiagnostics {
        d: strategy.d,
        bell_value: value,
        bound_residual: (value - quantum_bound(h)).abs(),
        alice_anticommutation: strategy.alice.anticommutation_residual(),
        alice_involution: strategy.alice.involution_residual(),
        alice_hermiticity: strategy.alice.hermiticity_residual(),
        bob_involution: strategy.bob.involution_residual(),
        bob_hermiticity: strategy.bob.hermiticity_residual(),
        moment_residual: (&table.joint - h.entries()).amax(),
        probability_normalization: probs.normalization_residual(),
        probability_negativity: (-probs.min_probability()).max(0.0),
        probability_roundtrip: (probs.joint_correlations() - &table.joint).amax(),
    })
}
