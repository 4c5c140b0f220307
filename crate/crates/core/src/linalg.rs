//! Small dense helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Frobenius norm of `Fᵀ F − I` for a frame with orthonormal columns.
pub fn orthonormality_defect(frame: &DMatrix<f64>) -> f64 {
    let gram = frame.transpose() * frame;
    (gram - DMatrix::identity(frame.ncols(), frame.ncols())).norm()
}

/// Largest entry of `|A + Aᵀ|`.
pub fn skew_defect(a: &DMatrix<f64>) -> f64 {
    (a + a.transpose()).amax()
}

pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).amax()
}

pub fn skew_part(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a - a.transpose()) * 0.5
}

pub fn check_square(a: &DMatrix<f64>, what: &str) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::invalid(format!(
            "{what} must be a non-empty square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

pub fn check_skew(a: &DMatrix<f64>, tol: f64, what: &str) -> Result<usize> {
    let n = check_square(a, what)?;
    let defect = skew_defect(a);
    if !(defect <= tol) {
        return Err(Error::invalid(format!(
            "{what} is not skew-symmetric (|A + Aᵀ|max = {defect:e})"
        )));
    }
    Ok(n)
}

/// Checks that `frame` has orthonormal columns within `tol` (Frobenius).
pub fn check_orthonormal(frame: &DMatrix<f64>, tol: f64, what: &str) -> Result<()> {
    if frame.ncols() == 0 || frame.ncols() > frame.nrows() {
        return Err(Error::invalid(format!(
            "{what} must have between 1 and {} columns, got {}",
            frame.nrows(),
            frame.ncols()
        )));
    }
    let defect = orthonormality_defect(frame);
    if !(defect <= tol) {
        return Err(Error::invalid(format!(
            "{what} columns are not orthonormal (‖FᵀF − I‖ = {defect:e})"
        )));
    }
    Ok(())
}

/// Orthogonal projector onto the column span of an orthonormal frame.
pub fn projector(frame: &DMatrix<f64>) -> DMatrix<f64> {
    frame * frame.transpose()
}

/// Orthogonal projector onto the column span of an arbitrary full-rank matrix,
/// `M (MᵀM)⁻¹ Mᵀ`.
pub fn span_projector(m: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let gram = m.transpose() * m;
    let inv = gram.cholesky()?.inverse();
    let p = m * inv * m.transpose();
    Some((&p + p.transpose()) * 0.5)
}

/// Symmetric eigen-decomposition with eigenvalues sorted nonincreasingly.
///
/// Ties keep the order produced by the solver.
pub fn sorted_symmetric_eigen(a: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let n = check_square(a, "matrix")?;
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 0)
        .ok_or_else(|| Error::EigenSolver("symmetric eigen iteration did not converge".into()))?;
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenSolver("non-finite eigenvalue".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the solver order inside clusters of equal values
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::invalid("matrix rows have unequal lengths"));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| a.row(i).iter().copied().collect())
        .collect()
}

/// Square matrix from a row-major flat slice.
pub fn square_from_row_major(values: &[f64]) -> Result<DMatrix<f64>> {
    let n = (values.len() as f64).sqrt().round() as usize;
    if n * n != values.len() || n == 0 {
        return Err(Error::invalid(format!(
            "row-major array of length {} is not a square matrix",
            values.len()
        )));
    }
    Ok(DMatrix::from_row_slice(n, n, values))
}

pub fn row_major(a: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len());
    for i in 0..a.nrows() {
        out.extend(a.row(i).iter());
    }
    out
}
