//! Distances between weighted flags and between subspaces.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::flagcore::{CovMatrix, FlagRep, FRAME_TOL};
use crate::linalg;

/// Principal angles below this are reported as exactly zero.
pub const ANGLE_SNAP: f64 = 1e-8;

/// Principal angles between two subspaces, nonincreasing, in `[0, π/2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalAngles(Vec<f64>);

impl PrincipalAngles {
    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest angle, or 0 for an empty list.
    pub fn largest(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    /// `√(θ₁² + … + θ_i²)`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|t| t * t).sum::<f64>().sqrt()
    }
}

fn check_rows(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

/// `‖A − B‖_F = √tr((A − B)²)`.
pub fn euclidean_distance(a: &CovMatrix, b: &CovMatrix) -> Result<f64> {
    check_rows(a.matrix(), b.matrix())?;
    Ok((a.matrix() - b.matrix()).norm())
}

fn singular_values_sorted(m: &DMatrix<f64>, descending: bool) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    if descending {
        s.sort_by(|a, b| b.total_cmp(a));
    } else {
        s.sort_by(|a, b| a.total_cmp(b));
    }
    s
}

/// Principal angles between the column spans of two orthonormal frames.
///
/// Cosines are the singular values of `EᵀF` and sines those of
/// `(I − EEᵀ)F`; the angle is `atan2(sin, cos)`, which stays accurate for
/// both small and nearly orthogonal pairs. The result has
/// `min(dim E, dim F)` entries.
pub fn principal_angles(e: &DMatrix<f64>, f: &DMatrix<f64>) -> Result<PrincipalAngles> {
    check_rows(e, f)?;
    linalg::check_orthonormal(e, FRAME_TOL, "first subspace basis")?;
    linalg::check_orthonormal(f, FRAME_TOL, "second subspace basis")?;
    // the sine formula needs dim F ≤ dim E
    let (e, f) = if e.ncols() >= f.ncols() { (e, f) } else { (f, e) };
    let q = f.ncols();
    let cos = singular_values_sorted(&(e.transpose() * f), true);
    let residual = f - e * (e.transpose() * f);
    let sin = singular_values_sorted(&residual, false);
    let mut angles: Vec<f64> = (0..q)
        .map(|k| {
            let c = cos[k].clamp(0.0, 1.0);
            let s = sin[k].clamp(0.0, 1.0);
            let t = s.atan2(c);
            if t < ANGLE_SNAP {
                0.0
            } else {
                t.min(std::f64::consts::FRAC_PI_2)
            }
        })
        .collect();
    angles.sort_by(|a, b| b.total_cmp(a));
    Ok(PrincipalAngles(angles))
}

/// `d_G = √Σθ_k²` between equal-dimension subspaces; divided by `√i` when
/// `normalized`.
pub fn grassmann_distance(e: &DMatrix<f64>, f: &DMatrix<f64>, normalized: bool) -> Result<f64> {
    if e.ncols() != f.ncols() {
        return Err(Error::DimensionMismatch {
            expected: e.ncols(),
            found: f.ncols(),
        });
    }
    let d = principal_angles(e, f)?.norm();
    Ok(if normalized {
        d / (e.ncols() as f64).sqrt()
    } else {
        d
    })
}

/// Normalized distances `d_i` between `span(u_1..u_i)` and `span(v_1..v_i)`.
fn level_distances(x: &FlagRep, y: &FlagRep) -> Result<Vec<f64>> {
    if x.n() != y.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            found: y.n(),
        });
    }
    let n = x.n();
    let (a, b) = (x.mu().as_slice(), y.mu().as_slice());
    (1..=n)
        .map(|i| {
            // levels with a vanishing weight never contribute
            if i == n || a[i - 1] == 0.0 || b[i - 1] == 0.0 {
                Ok(0.0)
            } else {
                grassmann_distance(&x.leading_columns(i), &y.leading_columns(i), true)
            }
        })
        .collect()
}

/// `Σ_i |α_i − β_i| + min(α_i, β_i) d_i`.
pub fn krakus_distance(x: &FlagRep, y: &FlagRep) -> Result<f64> {
    let d = level_distances(x, y)?;
    let (a, b) = (x.mu().as_slice(), y.mu().as_slice());
    Ok((0..a.len())
        .map(|i| (a[i] - b[i]).abs() + a[i].min(b[i]) * d[i])
        .sum())
}

/// `√Σ_i (α_i² + β_i² − 2 α_i β_i cos d_i)`, with `d_i` capped at `π`.
pub fn conic_distance(x: &FlagRep, y: &FlagRep) -> Result<f64> {
    let d = level_distances(x, y)?;
    let (a, b) = (x.mu().as_slice(), y.mu().as_slice());
    let total: f64 = (0..a.len())
        .map(|i| {
            let c = d[i].min(std::f64::consts::PI).cos();
            (a[i] * a[i] + b[i] * b[i] - 2.0 * a[i] * b[i] * c).max(0.0)
        })
        .sum();
    Ok(total.sqrt())
}
