//! Self-testing ROCN matrices built by concatenating orthogonal blocks,
//! plus the CHSH and elegant presets.
//!
//! For even `m` the blocks are `O^(0) = I_m` and, for `ℓ = 1..m`, the matrix
//! whose columns are the Gram–Schmidt vectors `a_ℓ1 … a_ℓm`. Every block is
//! orthogonal, so the concatenation is ROCN, and its columns form a
//! symmetric spanning set.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rocn::{RocnMatrix, DEFAULT_TOLERANCE};
use crate::symspan::gram_schmidt_family;

/// Default upper limit on `m` for constructions (`n = 156`, `d = 64`).
pub const MAX_CONSTRUCT_M: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockPlan {
    pub m: usize,
    pub blocks: Vec<DMatrix<f64>>,
    pub include_identity_block: bool,
}

impl BlockPlan {
    /// `max ‖OᵀO − I‖_max` over all blocks.
    pub fn orthogonality_residual(&self) -> f64 {
        let id = DMatrix::<f64>::identity(self.m, self.m);
        self.blocks
            .iter()
            .map(|b| (b.transpose() * b - &id).amax())
            .fold(0.0, f64::max)
    }

    /// Horizontal concatenation of the blocks, in order.
    pub fn concatenate(&self) -> DMatrix<f64> {
        let n = self.m * self.blocks.len();
        let mut h = DMatrix::zeros(self.m, n);
        for (l, block) in self.blocks.iter().enumerate() {
            h.view_mut((0, l * self.m), (self.m, self.m))
                .copy_from(block);
        }
        h
    }
}

fn check_m(m: usize, max_m: usize) -> Result<()> {
    if m % 2 == 1 {
        return Err(Error::MustBeEven(m));
    }
    if m < 2 || m > max_m {
        return Err(Error::OutOfRange {
            m,
            min: 2,
            max: max_m,
        });
    }
    Ok(())
}

/// Block `O^(ℓ)` for `ℓ ≥ 1`: columns `a_ℓ1 … a_ℓm`.
pub fn gram_schmidt_block(m: usize, l: usize) -> Result<DMatrix<f64>> {
    let family = gram_schmidt_family(m, l)?;
    let cols = family.vectors();
    Ok(DMatrix::from_fn(m, m, |r, c| cols[c][r]))
}

pub fn block_plan(m: usize, include_identity_block: bool, max_m: usize) -> Result<BlockPlan> {
    check_m(m, max_m)?;
    let mut blocks = Vec::with_capacity(m + 1);
    if include_identity_block {
        blocks.push(DMatrix::identity(m, m));
    }
    for l in 1..=m {
        blocks.push(gram_schmidt_block(m, l)?);
    }
    Ok(BlockPlan {
        m,
        blocks,
        include_identity_block,
    })
}

pub fn construction_label(m: usize, include_identity_block: bool) -> String {
    format!("construct-v1;m={m};identity={include_identity_block}")
}

/// The `m × m(m+1)` self-testing matrix (or `m × m²` without `O^(0)`),
/// with the default size cap.
pub fn build_self_testing_matrix(m: usize, include_identity_block: bool) -> Result<RocnMatrix> {
    build_self_testing_matrix_capped(m, include_identity_block, MAX_CONSTRUCT_M)
}

pub fn build_self_testing_matrix_capped(
    m: usize,
    include_identity_block: bool,
    max_m: usize,
) -> Result<RocnMatrix> {
    let plan = block_plan(m, include_identity_block, max_m)?;
    RocnMatrix::from_matrix(
        plan.concatenate(),
        Some(construction_label(m, include_identity_block)),
        DEFAULT_TOLERANCE,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Chsh,
    Elegant,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Chsh => "chsh",
            Preset::Elegant => "elegant",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chsh" => Ok(Preset::Chsh),
            "elegant" => Ok(Preset::Elegant),
            _ => Err(Error::UnknownPreset(s.to_string())),
        }
    }
}

/// CHSH: `(1/√2)[[1, 1], [1, −1]]`. Elegant: the 3×4 matrix whose columns
/// are `(±1, ±1, ±1)/√3` with an even number of minus signs.
pub fn preset(which: Preset) -> RocnMatrix {
    let rows = match which {
        Preset::Chsh => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![vec![s, s], vec![s, -s]]
        }
        Preset::Elegant => {
            let s = 1.0 / 3f64.sqrt();
            let columns = [
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ];
            (0..3)
                .map(|i| columns.iter().map(|c| s * c[i]).collect())
                .collect()
        }
    };
    RocnMatrix::from_rows(&rows, Some(format!("preset:{which}")), DEFAULT_TOLERANCE)
        .expect("presets are ROCN")
}
