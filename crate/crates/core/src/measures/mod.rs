//! Flagfolds on point clouds.
//!
//! A point-cloud flagfold is a finite sum `Σ m_i δ_{(x_i, S_i)}` of atoms
//! carrying a position, a trace-one PSD matrix and a mass. Several atoms
//! may share a position; together they describe a mixture of weighted
//! flags at that point. Reductions run over atoms in storage order.

mod covariance;
pub mod fields;
mod pushforward;
pub mod samples;

pub use covariance::{local_covariance, point_cloud_flagfold, Kernel};
pub use fields::{Affine, Bump, FnField, Radial, SmoothMap, VectorField};
pub use pushforward::{pushforward, pushforward_varifold};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flagcore::{self, CovMatrix, MatrixJson};
use crate::linalg;

fn check_mass(m: f64) -> Result<()> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::invalid(format!("mass must be finite and nonnegative, got {m}")));
    }
    Ok(())
}

fn check_position(x: &DVector<f64>, n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("positions must be finite"));
    }
    Ok(())
}

/// Finite weighted point set, the spatial marginal of a flagfold.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoints {
    n: usize,
    points: Vec<(DVector<f64>, f64)>,
}

impl WeightedPoints {
    pub fn new(n: usize, points: Vec<(DVector<f64>, f64)>) -> Result<Self> {
        for (x, m) in &points {
            check_position(x, n)?;
            check_mass(*m)?;
        }
        Ok(WeightedPoints { n, points })
    }

    /// Unit masses.
    pub fn unit(n: usize, positions: Vec<DVector<f64>>) -> Result<Self> {
        Self::new(n, positions.into_iter().map(|x| (x, 1.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[(DVector<f64>, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlagAtom {
    pub x: DVector<f64>,
    pub s: CovMatrix,
    pub m: f64,
}

/// JSON form of an atom: `{"x": [...], "S": [row-major], "m": mass}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagAtomJson {
    pub x: Vec<f64>,
    #[serde(rename = "S")]
    pub s: MatrixJson,
    pub m: f64,
}

impl From<&FlagAtom> for FlagAtomJson {
    fn from(a: &FlagAtom) -> Self {
        FlagAtomJson {
            x: a.x.iter().copied().collect(),
            s: MatrixJson::Flat(linalg::row_major(a.s.matrix())),
            m: a.m,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointCloudFlagfold {
    n: usize,
    atoms: Vec<FlagAtom>,
}

impl PointCloudFlagfold {
    pub fn new(n: usize, atoms: Vec<FlagAtom>) -> Result<Self> {
        for a in &atoms {
            check_position(&a.x, n)?;
            check_mass(a.m)?;
            if a.s.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: a.s.n() });
            }
        }
        Ok(PointCloudFlagfold { n, atoms })
    }

    pub fn from_json(atoms: Vec<FlagAtomJson>) -> Result<Self> {
        let first = atoms.first().ok_or_else(|| Error::invalid("flagfold has no atoms"))?;
        let n = first.x.len();
        let atoms = atoms
            .into_iter()
            .map(|a| {
                Ok(FlagAtom {
                    x: DVector::from_vec(a.x),
                    s: CovMatrix::new(a.s.to_matrix()?)?,
                    m: a.m,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, atoms)
    }

    pub fn to_json(&self) -> Vec<FlagAtomJson> {
        self.atoms.iter().map(FlagAtomJson::from).collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[FlagAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.m).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarifoldAtom {
    pub x: DVector<f64>,
    /// Orthonormal `n×d` basis of the tangent plane.
    pub frame: DMatrix<f64>,
    pub m: f64,
}

/// Point-cloud `d`-varifold.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloudVarifold {
    n: usize,
    d: usize,
    atoms: Vec<VarifoldAtom>,
}

impl PointCloudVarifold {
    pub fn new(n: usize, d: usize, atoms: Vec<VarifoldAtom>) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::invalid(format!("varifold dimension {d} outside 1..={n}")));
        }
        for a in &atoms {
            check_position(&a.x, n)?;
            check_mass(a.m)?;
            if a.frame.nrows() != n || a.frame.ncols() != d {
                return Err(Error::invalid(format!(
                    "varifold frame must be {n}x{d}, got {}x{}",
                    a.frame.nrows(),
                    a.frame.ncols()
                )));
            }
            linalg::check_orthonormal(&a.frame, flagcore::FRAME_TOL, "varifold frame")?;
        }
        Ok(PointCloudVarifold { n, d, atoms })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn atoms(&self) -> &[VarifoldAtom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.m).sum()
    }

    /// Classical first variation `Σ m tr(Π_P DX)`.
    pub fn first_variation<F: VectorField + ?Sized>(&self, field: &F) -> Result<f64> {
        check_field(field, self.n)?;
        Ok(self
            .atoms
            .iter()
            .map(|a| {
                let dx = field.jacobian(&a.x);
                // tr(P Pᵀ DX) = tr(Pᵀ DX P)
                a.m * (a.frame.transpose() * dx * &a.frame).trace()
            })
            .sum())
    }
}

fn check_field<F: VectorField + ?Sized>(field: &F, n: usize) -> Result<()> {
    if field.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: field.dim() });
    }
    Ok(())
}

/// `‖W‖`: positions with summed masses; atoms at identical positions are
/// merged, in order of first appearance.
pub fn mass(w: &PointCloudFlagfold) -> WeightedPoints {
    let mut points: Vec<(DVector<f64>, f64)> = Vec::new();
    for a in &w.atoms {
        match points.iter_mut().find(|(x, _)| *x == a.x) {
            Some(p) => p.1 += a.m,
            None => points.push((a.x.clone(), a.m)),
        }
    }
    WeightedPoints { n: w.n, points }
}

/// `V̂`: each plane `P` becomes `Π_P / d`; masses unchanged.
pub fn varifold_to_flagfold(v: &PointCloudVarifold) -> PointCloudFlagfold {
    let atoms = v
        .atoms
        .iter()
        .map(|a| FlagAtom {
            x: a.x.clone(),
            s: flagcore::embed_grassmannian(&a.frame).expect("varifold frames are orthonormal"),
            m: a.m,
        })
        .collect();
    PointCloudFlagfold { n: v.n, atoms }
}

/// `V_d`: atom `(x, S, m)` contributes `(x, E_d(S), m μ_d(S))` whenever
/// `μ_d(S) > zero_tol`. `d` is 1-based.
pub fn flagfold_to_varifolds(w: &PointCloudFlagfold, d: usize, zero_tol: f64) -> Result<PointCloudVarifold> {
    if d == 0 || d > w.n {
        return Err(Error::invalid(format!("varifold dimension {d} outside 1..={}", w.n)));
    }
    let mut atoms = Vec::new();
    for a in &w.atoms {
        let rep = flagcore::decompose(&a.s)?;
        let md = rep.mu().as_slice()[d - 1];
        if md > zero_tol {
            atoms.push(VarifoldAtom {
                x: a.x.clone(),
                frame: rep.leading_columns(d),
                m: a.m * md,
            });
        }
    }
    Ok(PointCloudVarifold { n: w.n, d, atoms })
}

/// Mass-weighted mean of `d̄(S)` over the atoms located exactly at `x`.
pub fn dimension_field(w: &PointCloudFlagfold, x: &DVector<f64>) -> Result<f64> {
    check_position(x, w.n)?;
    let mut mass = 0.0;
    let mut acc = 0.0;
    for a in w.atoms.iter().filter(|a| a.x == *x) {
        let rep = flagcore::decompose(&a.s)?;
        acc += a.m * flagcore::dimension(rep.mu());
        mass += a.m;
    }
    if !(mass > 0.0) {
        return Err(Error::invalid("no positive mass at the requested position"));
    }
    Ok(acc / mass)
}

/// `δW(X) = Σ m tr(S̄ DX(x))`.
pub fn first_variation<F: VectorField + ?Sized>(w: &PointCloudFlagfold, field: &F) -> Result<f64> {
    check_field(field, w.n)?;
    let mut total = 0.0;
    for a in &w.atoms {
        if a.m == 0.0 {
            continue;
        }
        let sbar = flagcore::sbar(&a.s)?;
        let dx = field.jacobian(&a.x);
        total += a.m * sbar.component_mul(&dx.transpose()).sum();
    }
    Ok(total)
}

/// `e^{Λρ} ρ^{−d*} ‖W‖(B̄_ρ(x))` for each radius; atoms at distance
/// exactly `ρ` count as inside.
pub fn monotonicity_ratio(w: &PointCloudFlagfold, x: &DVector<f64>, d_star: f64, lambda: f64,
                          radii: &[f64]) -> Result<Vec<f64>> {
    check_position(x, w.n)?;
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::invalid("radii must be positive and finite"));
    }
    if radii.windows(2).any(|p| !(p[0] < p[1])) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    if !d_star.is_finite() || !lambda.is_finite() {
        return Err(Error::invalid("d* and Λ must be finite"));
    }
    let mut dists: Vec<(f64, f64)> = w.atoms.iter().map(|a| ((&a.x - x).norm(), a.m)).collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = Vec::with_capacity(radii.len());
    let mut idx = 0;
    let mut inside = 0.0;
    for &rho in radii {
        while idx < dists.len() && dists[idx].0 <= rho {
            inside += dists[idx].1;
            idx += 1;
        }
        out.push((lambda * rho).exp() * rho.powf(-d_star) * inside);
    }
    Ok(out)
}
