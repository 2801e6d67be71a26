//! Small dense linear-algebra helpers on top of nalgebra's SVD.

use nalgebra::{ComplexField, DMatrix};

use crate::scalar::Real;

/// Singular values of a real or complex matrix (any order).
pub fn singular_values<S: ComplexField>(m: &DMatrix<S>) -> Vec<S::RealField> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone().singular_values().iter().cloned().collect()
}

/// Number of singular values strictly above `tol`.
pub fn numerical_rank<S: ComplexField>(m: &DMatrix<S>, tol: S::RealField) -> usize {
    singular_values(m).into_iter().filter(|s| *s > tol).count()
}

/// Smallest of the `min(rows, cols)` singular values; `None` for empty input.
pub fn sigma_min<T: Real>(m: &DMatrix<T>) -> Option<T> {
    singular_values(m).into_iter().reduce(|a, b| a.min(b))
}

/// Orthonormal basis of the null space of a real matrix, as columns.
pub fn null_space<T: Real>(m: &DMatrix<T>, tol: T) -> DMatrix<T> {
    let cols = m.ncols();
    // pad to square so the SVD returns a full V
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("svd with v");
    let picked: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] <= tol)
        .collect();
    let mut out = DMatrix::zeros(cols, picked.len());
    for (j, &k) in picked.iter().enumerate() {
        for i in 0..cols {
            out[(i, j)] = v_t[(k, i)];
        }
    }
    out
}

/// Orthonormal basis of the column span of `m`, dropping directions with
/// singular value at or below `tol`.
pub fn column_span<T: Real>(m: &DMatrix<T>, tol: T) -> DMatrix<T> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd with u");
    let picked: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > tol)
        .collect();
    let mut out = DMatrix::zeros(m.nrows(), picked.len());
    for (j, &k) in picked.iter().enumerate() {
        out.set_column(j, &u.column(k));
    }
    out
}

/// Orthonormal basis of the orthogonal complement of the column span of an
/// orthonormal `basis` inside `ℝ^ambient`.
pub fn orthogonal_complement<T: Real>(basis: &DMatrix<T>) -> DMatrix<T> {
    let ambient = basis.nrows();
    if basis.ncols() == 0 {
        return DMatrix::identity(ambient, ambient);
    }
    null_space(&basis.transpose(), nalgebra::convert(1e-9))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_row() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]);
        let k = null_space(&m, 1e-12);
        assert_eq!(k.ncols(), 2);
        assert!((&m * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn rank_and_span() {
        let m = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 0.0, 0.0]);
        assert_eq!(numerical_rank(&m, 1e-9), 1);
        assert_eq!(column_span(&m, 1e-9).ncols(), 1);
        let c = orthogonal_complement(&column_span(&m, 1e-9));
        assert_eq!(c.ncols(), 2);
        assert!((sigma_min(&DMatrix::<f64>::identity(3, 3)).unwrap() - 1.0).abs() < 1e-15);
    }
}
