use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{GeodesicState, Trajectory};
use crate::distances;
use crate::error::{Error, Result};
use crate::flagcore::{self, CovMatrix, FlagRep};

/// Ellipsoid of a weighted flag in `ℝ³`: semi-axes along the frame
/// columns with lengths `√(3 λ_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipsoid {
    /// Axis directions, one unit vector per entry.
    pub axes: Vec<Vec<f64>>,
    pub lengths: Vec<f64>,
}

impl Ellipsoid {
    pub fn of_rep(rep: &FlagRep) -> Result<Self> {
        if rep.n() != 3 {
            return Err(Error::invalid(format!("ellipsoids need n = 3, got {}", rep.n())));
        }
        let lambda = rep.lambda();
        Ok(Ellipsoid {
            axes: rep.frame().column_iter().map(|c| c.iter().copied().collect()).collect(),
            lengths: lambda.as_slice().iter().map(|l| (3.0 * l).sqrt()).collect(),
        })
    }
}

fn check_three(traj: &Trajectory) -> Result<()> {
    match traj.states.first() {
        Some(s) if s.n() == 3 => Ok(()),
        Some(s) => Err(Error::invalid(format!("diagnostics need n = 3, got {}", s.n()))),
        None => Err(Error::invalid("empty trajectory")),
    }
}

pub fn ellipsoid_frames(traj: &Trajectory) -> Result<Vec<Ellipsoid>> {
    check_three(traj)?;
    traj.states.iter().map(|s| Ellipsoid::of_rep(&s.flag_rep()?)).collect()
}

/// Per state, `θ₁` between the first frame columns at times `0` and `t`,
/// and `θ₂`, the largest principal angle between the spans of the first
/// two columns.
pub fn angle_diagnostics(traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    check_three(traj)?;
    frame_angles(&traj.states)
}

/// The angles of [`angle_diagnostics`] for any `n ≥ 2`.
pub(crate) fn frame_angles(states: &[GeodesicState]) -> Result<Vec<(f64, f64)>> {
    let first = states.first().ok_or_else(|| Error::invalid("empty trajectory"))?;
    if first.n() < 2 {
        return Err(Error::invalid("frame angles need n ≥ 2"));
    }
    let u0 = first.flag_rep()?;
    let (l0, p0) = (u0.leading_columns(1), u0.leading_columns(2));
    states
        .iter()
        .map(|s| {
            let rep = s.flag_rep()?;
            let t1 = distances::principal_angles(&l0, &rep.leading_columns(1))?.largest();
            let t2 = distances::principal_angles(&p0, &rep.leading_columns(2))?.largest();
            Ok((t1, t2))
        })
        .collect()
}

/// Decomposed samples of `(1 − s) A₀ + s A₁` at `s = p/N`, `p = 0..=N`.
pub fn euclidean_geodesic(a0: &CovMatrix, a1: &CovMatrix, steps: usize) -> Result<Vec<FlagRep>> {
    if a0.n() != a1.n() {
        return Err(Error::DimensionMismatch { expected: a0.n(), found: a1.n() });
    }
    if steps == 0 {
        return Err(Error::invalid("euclidean geodesic needs at least one step"));
    }
    (0..=steps)
        .map(|p| {
            let s = p as f64 / steps as f64;
            let m: DMatrix<f64> = a0.matrix() * (1.0 - s) + a1.matrix() * s;
            flagcore::decompose(&CovMatrix::new((&m + m.transpose()) * 0.5)?)
        })
        .collect()
}
