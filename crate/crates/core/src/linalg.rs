//! Small SVD helpers shared by the rank computations.

use nalgebra::{DMatrix, DVector};

/// Singular values of `a` sorted in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = a.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Number of singular values strictly above `cutoff`.
pub fn rank_above(singular_values: &[f64], cutoff: f64) -> usize {
    singular_values.iter().filter(|&&s| s > cutoff).count()
}

/// Right singular vector belonging to the smallest singular value of `a`,
/// taken over all `a.ncols()` directions (rows are zero-padded when `a` is
/// wide, so kernel directions are never dropped by a thin decomposition).
///
/// The sign is fixed so that the first coordinate with magnitude above
/// `1e-12` is positive.
pub fn smallest_right_singular_vector(a: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let (rows, cols) = a.shape();
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(&y.1).then(y.0.cmp(&x.0)))
        .expect("non-empty matrix");
    let mut v: DVector<f64> = v_t.row(idx).transpose();
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            v = -v;
        }
    }
    (sigma, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_simple_matrices() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let sv = singular_values(&a);
        assert_eq!(rank_above(&sv, 1e-12 * sv[0]), 1);
        assert_eq!(rank_above(&singular_values(&DMatrix::zeros(2, 3)), 0.0), 0);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let (sigma, v) = smallest_right_singular_vector(&a);
        assert!(sigma.abs() < 1e-15);
        assert!((&a * &v).norm() < 1e-14);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert!(v[0] > 0.0);
    }
}
