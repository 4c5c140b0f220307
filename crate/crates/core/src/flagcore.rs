//! Weighted flags: simplex weights, eigenvalue weights, frames and the
//! trace-one positive-semidefinite matrices they encode.
//!
//! A weighted flag is a pair `(μ, U)` with `μ` in the simplex and `U`
//! orthogonal. The eigenvalue vector `λ` and the weights `μ` are related by
//! the linear bijection
//!
//! ```text
//! μ_k = k (λ_k − λ_{k+1}),  μ_n = n λ_n        λ_k = Σ_{i ≥ k} μ_i / i
//! ```
//!
//! and the pair maps to `U diag(λ) Uᵀ`. Two pairs are the same weighted flag
//! exactly when they produce the same matrix, which is how quotient
//! equality is checked throughout the crate.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Tolerance on `Σ μ = 1` and `Σ λ = 1`.
pub const SUM_TOL: f64 = 1e-12;
/// Default threshold below which a weight counts as zero in type detection.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;
/// Frobenius tolerance on `UᵀU = I` for frames.
pub const FRAME_TOL: f64 = 1e-10;
/// Symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues in `[−PSD_TOL, 0)` are clamped to zero.
pub const PSD_TOL: f64 = 1e-10;

fn check_sum(values: &[f64], what: &str) -> Result<()> {
    let sum: f64 = values.iter().sum();
    if !((sum - 1.0).abs() <= SUM_TOL) {
        return Err(Error::invalid(format!("{what} must sum to 1, got {sum:.17}")));
    }
    Ok(())
}

/// A point of the simplex `Δ(n)`: the weights of a weighted flag.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector(DVector<f64>);

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("weight vector must be non-empty"));
        }
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        check_sum(&entries, "weights")?;
        Ok(WeightVector(DVector::from_vec(entries)))
    }

    /// The simplex vertex `e_d` (1-based `d`), which encodes a `d`-plane.
    pub fn vertex(n: usize, d: usize) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::invalid(format!("vertex index {d} outside 1..={n}")));
        }
        let mut v = vec![0.0; n];
        v[d - 1] = 1.0;
        Ok(WeightVector(DVector::from_vec(v)))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0.as_slice().to_vec()
    }
}

/// Nonincreasing eigenvalues of a trace-one PSD matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenWeights(DVector<f64>);

impl EigenWeights {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("eigenvalue vector must be non-empty"));
        }
        if entries.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("eigenvalues must be finite and nonnegative"));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::invalid("eigenvalues must be nonincreasing"));
        }
        check_sum(&entries, "eigenvalues")?;
        Ok(EigenWeights(DVector::from_vec(entries)))
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }
}

/// `μ_k = k (λ_k − λ_{k+1})` on raw slices; no validation.
pub(crate) fn mu_from_lambda_raw(lambda: &[f64]) -> DVector<f64> {
    let n = lambda.len();
    DVector::from_fn(n, |k, _| {
        let next = if k + 1 < n { lambda[k + 1] } else { 0.0 };
        (k + 1) as f64 * (lambda[k] - next)
    })
}

/// `λ_k = Σ_{i ≥ k} μ_i / i` on raw slices; no validation.
pub(crate) fn lambda_from_mu_raw(mu: &[f64]) -> DVector<f64> {
    let n = mu.len();
    let mut out = DVector::zeros(n);
    let mut acc = 0.0;
    for k in (0..n).rev() {
        acc += mu[k] / (k + 1) as f64;
        out[k] = acc;
    }
    out
}

pub fn lambda_to_mu(lambda: &EigenWeights) -> WeightVector {
    let mut mu = mu_from_lambda_raw(lambda.as_slice());
    // sorted input makes every difference nonnegative; guard the -0.0 case
    mu.iter_mut().for_each(|v| *v = v.max(0.0));
    WeightVector(mu)
}

pub fn mu_to_lambda(mu: &WeightVector) -> EigenWeights {
    EigenWeights(lambda_from_mu_raw(mu.as_slice()))
}

/// Flag type `(p_1, …, p_r)`: the dimension increments of a flag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct FlagType(Vec<usize>);

impl FlagType {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::invalid("flag type parts must be positive and non-empty"));
        }
        Ok(FlagType(parts))
    }

    /// The complete flag type `(1, …, 1)`.
    pub fn complete(n: usize) -> Self {
        FlagType(vec![1; n])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Cumulative dimensions `d_k = p_1 + … + p_k`; the last one is `n`.
    pub fn dims(&self) -> Vec<usize> {
        self.0
            .iter()
            .scan(0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }

    /// Half-open 0-based index ranges of the diagonal blocks.
    pub fn blocks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.0
            .iter()
            .map(|&p| {
                let r = start..start + p;
                start += p;
                r
            })
            .collect()
    }
}

impl TryFrom<Vec<usize>> for FlagType {
    type Error = Error;
    fn try_from(parts: Vec<usize>) -> Result<Self> {
        FlagType::new(parts)
    }
}

impl From<FlagType> for Vec<usize> {
    fn from(t: FlagType) -> Vec<usize> {
        t.0
    }
}

impl fmt::Display for FlagType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Type of the flag carried by weights `μ`.
///
/// With `k_1 < … < k_r` the indices of the weights above `zero_tol`, the
/// type is `(k_1, k_2 − k_1, …, k_r − k_{r−1})`, followed by `n − k_r` when
/// the last weight vanishes.
pub fn type_of(mu: &WeightVector, zero_tol: f64) -> Result<FlagType> {
    if !(zero_tol >= 0.0) {
        return Err(Error::invalid("zero_tol must be nonnegative"));
    }
    let n = mu.n();
    let mut parts = Vec::new();
    let mut run = 0;
    for &w in mu.as_slice() {
        run += 1;
        if w > zero_tol {
            parts.push(run);
            run = 0;
        }
    }
    if parts.is_empty() {
        return Err(Error::invalid(format!(
            "all {n} weights are below zero_tol = {zero_tol:e}"
        )));
    }
    if run > 0 {
        parts.push(run);
    }
    Ok(FlagType(parts))
}

/// `d̄(μ) = Σ k μ_k`, the dimension of a weighted flag.
pub fn dimension(mu: &WeightVector) -> f64 {
    mu.as_slice()
        .iter()
        .enumerate()
        .map(|(k, w)| (k + 1) as f64 * w)
        .sum()
}

/// A symmetric positive-semidefinite `n×n` matrix with unit trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct CovMatrix(DMatrix<f64>);

impl CovMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        linalg::check_square(&m, "covariance matrix")?;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("covariance matrix has non-finite entries"));
        }
        let sym = linalg::symmetry_defect(&m);
        if !(sym <= SYMMETRY_TOL) {
            return Err(Error::invalid(format!(
                "covariance matrix is not symmetric (defect {sym:e})"
            )));
        }
        let tr = m.trace();
        if !((tr - 1.0).abs() <= SUM_TOL) {
            return Err(Error::invalid(format!("covariance matrix trace is {tr:.17}, not 1")));
        }
        let (vals, _) = linalg::sorted_symmetric_eigen(&m)?;
        let min = vals[vals.len() - 1];
        if min < -PSD_TOL {
            return Err(Error::invalid(format!(
                "covariance matrix has eigenvalue {min:e} below -{PSD_TOL:e}"
            )));
        }
        Ok(CovMatrix(m))
    }

    /// Wraps a matrix already known to be symmetric, PSD and of unit trace.
    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        CovMatrix(m)
    }

    /// `A/tr(A)` after symmetrization, for PSD matrices of positive trace.
    pub fn normalized(m: DMatrix<f64>) -> Result<Self> {
        linalg::check_square(&m, "matrix")?;
        let sym = (&m + m.transpose()) * 0.5;
        let tr = sym.trace();
        if !(tr > 0.0) {
            return Err(Error::invalid("matrix trace must be positive to normalize"));
        }
        CovMatrix::new(sym / tr)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// JSON form of a square matrix: nested rows, or a flat row-major array.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        match self {
            MatrixJson::Rows(rows) => linalg::matrix_from_rows(rows),
            MatrixJson::Flat(values) => linalg::square_from_row_major(values),
        }
    }
}

impl From<&DMatrix<f64>> for MatrixJson {
    fn from(m: &DMatrix<f64>) -> Self {
        MatrixJson::Rows(linalg::matrix_to_rows(m))
    }
}

impl TryFrom<MatrixJson> for CovMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        CovMatrix::new(j.to_matrix()?)
    }
}

impl From<CovMatrix> for MatrixJson {
    fn from(c: CovMatrix) -> Self {
        MatrixJson::from(&c.0)
    }
}

/// A representative `(μ, U)` of a weighted flag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FlagRepJson", into = "FlagRepJson")]
pub struct FlagRep {
    mu: WeightVector,
    frame: DMatrix<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagRepJson {
    pub mu: Vec<f64>,
    pub frame: MatrixJson,
}

impl TryFrom<FlagRepJson> for FlagRep {
    type Error = Error;
    fn try_from(j: FlagRepJson) -> Result<Self> {
        FlagRep::new(WeightVector::new(j.mu)?, j.frame.to_matrix()?)
    }
}

impl From<FlagRep> for FlagRepJson {
    fn from(r: FlagRep) -> Self {
        FlagRepJson {
            frame: MatrixJson::from(&r.frame),
            mu: r.mu.into_vec(),
        }
    }
}

impl FlagRep {
    pub fn new(mu: WeightVector, frame: DMatrix<f64>) -> Result<Self> {
        let n = mu.n();
        if frame.nrows() != n || frame.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: frame.nrows().max(frame.ncols()),
            });
        }
        linalg::check_orthonormal(&frame, FRAME_TOL, "frame")?;
        Ok(FlagRep { mu, frame })
    }

    pub fn identity(mu: WeightVector) -> Self {
        let n = mu.n();
        FlagRep {
            mu,
            frame: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.mu.n()
    }

    pub fn mu(&self) -> &WeightVector {
        &self.mu
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn lambda(&self) -> EigenWeights {
        mu_to_lambda(&self.mu)
    }

    /// First `k` frame columns: an orthonormal basis of the `k`-th subspace.
    pub fn leading_columns(&self, k: usize) -> DMatrix<f64> {
        self.frame.columns(0, k).into_owned()
    }

    /// `U diag(λ) Uᵀ`.
    pub fn compose(&self) -> CovMatrix {
        compose(self)
    }

    /// Same class with each frame column's first entry above `1e-9` in
    /// magnitude made positive. Only meant for reproducible text output.
    pub fn canonicalized(&self) -> FlagRep {
        let mut frame = self.frame.clone();
        for mut col in frame.column_iter_mut() {
            if let Some(first) = col.iter().copied().find(|v| v.abs() > 1e-9) {
                if first < 0.0 {
                    col.neg_mut();
                }
            }
        }
        FlagRep {
            mu: self.mu.clone(),
            frame,
        }
    }
}

/// `h(μ, U) = U diag(λ(μ)) Uᵀ`.
pub fn compose(rep: &FlagRep) -> CovMatrix {
    let lambda = lambda_from_mu_raw(rep.mu.as_slice());
    let m = &rep.frame * DMatrix::from_diagonal(&lambda) * rep.frame.transpose();
    CovMatrix((&m + m.transpose()) * 0.5)
}

/// Eigenvalues (clamped and renormalized) and sorted eigenvectors of `S`.
fn clamped_eigen(s: &CovMatrix) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let (mut vals, vecs) = linalg::sorted_symmetric_eigen(s.matrix())?;
    for v in vals.iter_mut() {
        if *v < 0.0 {
            if *v < -PSD_TOL {
                return Err(Error::invalid(format!(
                    "eigenvalue {v:e} is below the PSD tolerance -{PSD_TOL:e}"
                )));
            }
            *v = 0.0;
        }
    }
    let total = vals.sum();
    if !(total > 0.0) {
        return Err(Error::EigenSolver("eigenvalues sum to zero".into()));
    }
    Ok((vals / total, vecs))
}

/// `h⁻¹(S)`: weights from the sorted eigenvalues, eigenvectors as frame.
///
/// Inside a cluster of equal eigenvalues the solver's basis is kept; any
/// orthonormal basis of the cluster represents the same weighted flag.
pub fn decompose(s: &CovMatrix) -> Result<FlagRep> {
    let (lambda, frame) = clamped_eigen(s)?;
    let mut mu = mu_from_lambda_raw(lambda.as_slice());
    mu.iter_mut().for_each(|v| *v = v.max(0.0));
    let sum = mu.sum();
    if !((sum - 1.0).abs() <= SUM_TOL) {
        mu /= sum;
    }
    let defect = linalg::orthonormality_defect(&frame);
    if !(defect <= FRAME_TOL) {
        return Err(Error::EigenSolver(format!(
            "eigenvector basis is not orthonormal (defect {defect:e})"
        )));
    }
    Ok(FlagRep {
        mu: WeightVector(mu),
        frame,
    })
}

/// `S̄ = Σ μ_k(S) Π_{E_k(S)}`: same eigenvectors as `S`, eigenvalues
/// `Σ_{k ≥ i} μ_k`.
pub fn sbar(s: &CovMatrix) -> Result<DMatrix<f64>> {
    let rep = decompose(s)?;
    Ok(sbar_of_rep(&rep))
}

pub(crate) fn sbar_of_rep(rep: &FlagRep) -> DMatrix<f64> {
    let mu = rep.mu.as_slice();
    let n = mu.len();
    let mut eig = DVector::zeros(n);
    let mut acc = 0.0;
    for i in (0..n).rev() {
        acc += mu[i];
        eig[i] = acc;
    }
    let m = &rep.frame * DMatrix::from_diagonal(&eig) * rep.frame.transpose();
    (&m + m.transpose()) * 0.5
}

/// `i(P) = Π_P / d` for an orthonormal `d`-frame spanning `P`.
pub fn embed_grassmannian(basis: &DMatrix<f64>) -> Result<CovMatrix> {
    linalg::check_orthonormal(basis, FRAME_TOL, "subspace basis")?;
    let d = basis.ncols() as f64;
    let p = linalg::projector(basis) / d;
    Ok(CovMatrix((&p + p.transpose()) * 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn lambda_to_mu_examples() {
        let cases: [(&[f64], &[f64]); 3] = [
            (&[1.0, 0.0, 0.0], &[1.0, 0.0, 0.0]),
            (&[0.5, 0.5, 0.0], &[0.0, 1.0, 0.0]),
            (&[2.0 / 3.0, 1.0 / 3.0, 0.0], &[1.0 / 3.0, 2.0 / 3.0, 0.0]),
        ];
        for (lambda, mu) in cases {
            let got = lambda_to_mu(&EigenWeights::new(lambda.to_vec()).unwrap());
            assert!(close(got.as_slice(), mu, 1e-15), "{lambda:?} -> {got:?}");
        }
    }

    #[test]
    fn eigen_weights_reject_bad_input() {
        assert!(EigenWeights::new(vec![0.2, 0.8]).is_err());
        assert!(EigenWeights::new(vec![0.6, 0.6]).is_err());
        assert!(EigenWeights::new(vec![1.1, -0.1]).is_err());
        assert!(WeightVector::new(vec![0.5, 0.4]).is_err());
        assert!(WeightVector::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn mu_to_lambda_examples() {
        let got = mu_to_lambda(&w(&[1.0 / 3.0, 2.0 / 3.0, 0.0]));
        assert!(close(got.as_slice(), &[2.0 / 3.0, 1.0 / 3.0, 0.0], 1e-15));
        for n in 1..7 {
            let got = mu_to_lambda(&WeightVector::vertex(n, n).unwrap());
            assert!(close(got.as_slice(), &vec![1.0 / n as f64; n], 1e-15));
        }
    }

    #[test]
    fn mu_lambda_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let mu = sampling::random_simplex(&mut rng, 5);
            let back = lambda_to_mu(&mu_to_lambda(&mu));
            assert!(close(back.as_slice(), mu.as_slice(), 1e-13));
        }
    }

    #[test]
    fn type_examples() {
        let mu = w(&[0.0, 0.0, 1.0 / 6.0, 0.5, 0.0, 1.0 / 3.0, 0.0]);
        assert_eq!(type_of(&mu, DEFAULT_ZERO_TOL).unwrap().parts(), &[3, 1, 2, 1]);
        for n in 2..6 {
            let line = WeightVector::vertex(n, 1).unwrap();
            assert_eq!(type_of(&line, 1e-9).unwrap().parts(), &[1, n - 1]);
            let full = WeightVector::vertex(n, n).unwrap();
            assert_eq!(type_of(&full, 1e-9).unwrap().parts(), &[n]);
        }
        // noise below the tolerance is ignored
        let noisy = w(&[1.0 - 1e-12, 1e-12, 0.0]);
        assert_eq!(type_of(&noisy, 1e-9).unwrap().parts(), &[1, 2]);
        assert!(type_of(&noisy, -1.0).is_err());
        assert!(type_of(&w(&[0.5, 0.5]), 0.6).is_err());
    }

    #[test]
    fn decompose_diagonal_example() {
        let s = CovMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            2.0 / 3.0,
            1.0 / 3.0,
            0.0,
        ])))
        .unwrap();
        let rep = decompose(&s).unwrap();
        assert!(close(rep.mu().as_slice(), &[1.0 / 3.0, 2.0 / 3.0, 0.0], 1e-14));
        let u = rep.frame();
        assert!((u[(0, 0)].abs() - 1.0).abs() < 1e-14);
        let p2 = linalg::projector(&rep.leading_columns(2));
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((p2 - expect).norm() < 1e-14);
    }

    #[test]
    fn decompose_isotropic() {
        let n = 4;
        let s = CovMatrix::new(DMatrix::identity(n, n) / n as f64).unwrap();
        let rep = decompose(&s).unwrap();
        assert!(close(rep.mu().as_slice(), &[0.0, 0.0, 0.0, 1.0], 1e-14));
        assert!((rep.compose().matrix() - s.matrix()).norm() < 1e-14);
    }

    #[test]
    fn decompose_rank_one_line() {
        let theta = std::f64::consts::PI / 3.0;
        let (c, sn) = (theta.cos(), theta.sin());
        let b = DMatrix::from_row_slice(2, 2, &[c * c, c * sn, c * sn, sn * sn]);
        let rep = decompose(&CovMatrix::new(b).unwrap()).unwrap();
        assert!(close(rep.mu().as_slice(), &[1.0, 0.0], 1e-14));
        let u1 = rep.frame().column(0);
        let align = (u1[0] * c + u1[1] * sn).abs();
        assert!((align - 1.0).abs() < 1e-14);
    }

    #[test]
    fn near_psd_is_clamped_but_negative_rejected() {
        let eps = 5e-11;
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 + eps, -eps]));
        let rep = decompose(&CovMatrix::new(m).unwrap()).unwrap();
        assert_eq!(rep.mu().as_slice()[1], 0.0);
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![1.001, -0.001]));
        assert!(CovMatrix::new(bad).is_err());
    }

    #[test]
    fn cov_matrix_validation() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(CovMatrix::new(asym).is_err());
        let trace2 = DMatrix::identity(2, 2);
        assert!(CovMatrix::new(trace2.clone()).is_err());
        assert!(CovMatrix::normalized(trace2).is_ok());
    }

    #[test]
    fn compose_examples() {
        let rep = FlagRep::identity(w(&[1.0, 0.0, 0.0]));
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 0.0]));
        assert!((rep.compose().matrix() - expect).norm() < 1e-15);
        let rep = FlagRep::identity(w(&[1.0 / 3.0, 2.0 / 3.0, 0.0]));
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0 / 3.0, 1.0 / 3.0, 0.0]));
        assert!((rep.compose().matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn flag_rep_rejects_non_orthogonal_frame() {
        let frame = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(FlagRep::new(w(&[0.5, 0.5]), frame).is_err());
        assert!(FlagRep::new(w(&[0.5, 0.5]), DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(dimension(&WeightVector::vertex(5, 3).unwrap()), 3.0);
        assert!((dimension(&w(&[1.0 / 3.0, 2.0 / 3.0, 0.0])) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sbar_examples() {
        let s = CovMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![
            2.0 / 3.0,
            1.0 / 3.0,
            0.0,
        ])))
        .unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0 / 3.0, 0.0]));
        assert!((sbar(&s).unwrap() - expect).norm() < 1e-14);

        let iso = CovMatrix::new(DMatrix::identity(3, 3) / 3.0).unwrap();
        assert!((sbar(&iso).unwrap() - DMatrix::identity(3, 3)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = sampling::random_orthogonal(&mut rng, 5);
        let basis = u.columns(0, 2).into_owned();
        let plane = embed_grassmannian(&basis).unwrap();
        let pi = linalg::projector(&basis);
        assert!((sbar(&plane).unwrap() - pi).norm() < 1e-12);
    }

    #[test]
    fn dimension_is_trace_of_sbar() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let rep = sampling::random_flag_rep(&mut rng, 4);
            let s = rep.compose();
            let d = dimension(&decompose(&s).unwrap().mu().clone());
            assert!((sbar(&s).unwrap().trace() - d).abs() < 1e-12);
            assert!((dimension(rep.mu()) - d).abs() < 1e-12);
        }
    }

    #[test]
    fn grassmannian_embedding_examples() {
        let e12 = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let s = embed_grassmannian(&e12).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 0.5, 0.0]));
        assert!((s.matrix() - expect).norm() < 1e-15);

        let e3 = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        let s = embed_grassmannian(&e3).unwrap();
        let expect = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, 1.0]));
        assert!((s.matrix() - expect).norm() < 1e-15);

        let skewed = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        assert!(embed_grassmannian(&skewed).is_err());
    }

    #[test]
    fn random_frames_embed_with_expected_type() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..7 {
            for d in 1..=n {
                let u = sampling::random_orthogonal(&mut rng, n);
                let s = embed_grassmannian(&u.columns(0, d).into_owned()).unwrap();
                let rep = decompose(&s).unwrap();
                let mut expect = vec![d];
                if d < n {
                    expect.push(n - d);
                }
                assert_eq!(type_of(rep.mu(), 1e-9).unwrap().parts(), &expect[..]);
                assert!((rep.mu().as_slice()[d - 1] - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn canonical_form_is_same_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rep = sampling::random_flag_rep(&mut rng, 4);
        let canon = rep.canonicalized();
        assert!((canon.compose().matrix() - rep.compose().matrix()).norm() < 1e-14);
        for col in canon.frame().column_iter() {
            let first = col.iter().find(|v| v.abs() > 1e-9).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rep = sampling::random_flag_rep(&mut rng, 3);
        let text = serde_json::to_string(&rep).unwrap();
        let back: FlagRep = serde_json::from_str(&text).unwrap();
        assert!((back.frame() - rep.frame()).norm() < 1e-15);
        let cov: CovMatrix = serde_json::from_str("[0.5, 0.0, 0.0, 0.5]").unwrap();
        assert_eq!(cov.n(), 2);
        let t: FlagType = serde_json::from_str("[2, 1]").unwrap();
        assert_eq!(serde_json::to_string(&t).unwrap(), "[2,1]");
        assert!(serde_json::from_str::<FlagType>("[2, 0]").is_err());
    }
}
