//! Seeded random generators for weights, frames and matrices.
//!
//! Used by the CLI demo generators and by the test suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::flagcore::{CovMatrix, FlagRep, WeightVector};

/// Uniform point of the open simplex (flat Dirichlet).
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightVector {
    let raw: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    normalize(raw)
}

/// Simplex point where each weight is zero with probability one half
/// (at least one weight stays positive). Produces repeated eigenvalues.
pub fn random_sparse_simplex<R: Rng + ?Sized>(rng: &mut R, n: usize) -> WeightVector {
    let keep = rng.random_range(0..n);
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            let e: f64 = Exp1.sample(rng);
            if k == keep || rng.random_bool(0.5) {
                e
            } else {
                0.0
            }
        })
        .collect();
    normalize(raw)
}

fn normalize(raw: Vec<f64>) -> WeightVector {
    let total: f64 = raw.iter().sum();
    let mut v: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // push the rounding residue onto the largest entry
    let residue = 1.0 - v.iter().sum::<f64>();
    let imax = (0..v.len()).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
    v[imax] += residue;
    WeightVector::new(v).expect("normalized weights are valid")
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal absorbed into `Q`).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = random_gaussian_matrix(rng, n, n).qr();
    let mut q = qr.q();
    let r = qr.r();
    for (j, mut col) in q.column_iter_mut().enumerate() {
        if r[(j, j)] < 0.0 {
            col.neg_mut();
        }
    }
    q
}

pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = random_gaussian_matrix(rng, n, n);
    (&g - g.transpose()) * 0.5
}

pub fn random_flag_rep<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FlagRep {
    let mu = random_simplex(rng, n);
    FlagRep::new(mu, random_orthogonal(rng, n)).expect("random frame is orthogonal")
}

pub fn random_cov<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CovMatrix {
    random_flag_rep(rng, n).compose()
}

/// Random unit vector in `ℝⁿ`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
