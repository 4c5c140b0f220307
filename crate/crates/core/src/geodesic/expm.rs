use nalgebra::DMatrix;

use crate::error::Result;
use crate::linalg;

/// Accepts skew inputs up to this entrywise defect.
const SKEW_TOL: f64 = 1e-12;
const TAYLOR_DEGREE: usize = 18;

/// Matrix exponential of a skew-symmetric matrix by scaling and squaring a
/// Taylor polynomial. The zero matrix maps to the identity exactly.
pub fn expm_skew(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = linalg::check_skew(a, SKEW_TOL, "exponent")?;
    let norm = a.norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = DMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=TAYLOR_DEGREE {
        term = &term * &scaled / k as f64;
        if term.amax() == 0.0 {
            break;
        }
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}
