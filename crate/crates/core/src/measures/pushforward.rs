use nalgebra::DMatrix;

use super::{FlagAtom, PointCloudFlagfold, PointCloudVarifold, SmoothMap, VarifoldAtom};
use crate::error::{Error, Result};
use crate::flagcore;

/// Smallest accepted `d`-Jacobian.
const JACOBIAN_TOL: f64 = 1e-12;

/// Orthonormal basis of `span(M)` and the Jacobian `√det(MᵀM)`.
fn image_plane(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let d = m.ncols();
    let gram = m.transpose() * m;
    let jac = gram.determinant().max(0.0).sqrt();
    if !(jac > JACOBIAN_TOL) {
        return Err(Error::DegeneratePushforward { dim: d });
    }
    let q = m.clone().qr().q();
    Ok((q.columns(0, d).into_owned(), jac))
}

fn check_map<P: SmoothMap + ?Sized>(phi: &P, n: usize) -> Result<()> {
    if phi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: phi.dim() });
    }
    Ok(())
}

/// `Φ♯W`: each level `k` with `μ_k(S) > zero_tol` gives an atom at `Φ(x)`
/// with flag `i(DΦ(x) E_k(S))` and mass `m μ_k(S) JΦ(x, E_k(S))`. Levels
/// of one atom stay separate atoms.
pub fn pushforward<P: SmoothMap + ?Sized>(w: &PointCloudFlagfold, phi: &P, zero_tol: f64) -> Result<PointCloudFlagfold> {
    check_map(phi, w.n())?;
    let mut atoms = Vec::new();
    for a in w.atoms() {
        let rep = flagcore::decompose(&a.s)?;
        let y = phi.value(&a.x);
        let jac = phi.jacobian(&a.x);
        for (k, &mk) in rep.mu().as_slice().iter().enumerate() {
            if mk <= zero_tol {
                continue;
            }
            let (basis, j) = image_plane(&(&jac * rep.leading_columns(k + 1)))?;
            atoms.push(FlagAtom {
                x: y.clone(),
                s: flagcore::embed_grassmannian(&basis)?,
                m: a.m * mk * j,
            });
        }
    }
    PointCloudFlagfold::new(w.n(), atoms)
}

/// Classical `Φ♯V`: planes mapped by `DΦ`, masses scaled by the Jacobian.
pub fn pushforward_varifold<P: SmoothMap + ?Sized>(v: &PointCloudVarifold, phi: &P) -> Result<PointCloudVarifold> {
    check_map(phi, v.n())?;
    let atoms = v
        .atoms()
        .iter()
        .map(|a| {
            let (frame, j) = image_plane(&(phi.jacobian(&a.x) * &a.frame))?;
            Ok(VarifoldAtom { x: phi.value(&a.x), frame, m: a.m * j })
        })
        .collect::<Result<Vec<_>>>()?;
    PointCloudVarifold::new(v.n(), v.d(), atoms)
}
