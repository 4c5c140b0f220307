//! The pinched metric on weighted flags, tangent vectors, and discrete
//! lengths and energies of sampled paths.
//!
//! A tangent vector at `(μ, U)` is a pair `(α, B)` with `Σα = 0` and `B`
//! skew, the frame velocity written as `UᵀU′`. The metric is
//!
//! ```text
//! g((α, B), (β, C)) = α·β + w Σ_{i<j} f(μ_{i→j})² b_ij c_ij
//! ```
//!
//! where `μ_{i→j}` keeps the weights `μ_i, …, μ_{j−1}` and `w` is the
//! off-diagonal weight chosen by [`SkewConvention`].

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flagcore::{self, FlagRep, FlagType, WeightVector};
use crate::linalg;
use crate::stratify;

/// Tolerance on `Σα = 0` and on skew-symmetry of tangent components.
pub const TANGENT_TOL: f64 = 1e-12;

/// A pinch function `f : [0,1]ⁿ → ℝ₊`, zero only at the origin.
pub trait Pinch: Send + Sync + Debug {
    fn value(&self, nu: &[f64]) -> f64;

    /// Gradient of `f`; `None` where it is undefined (the origin for
    /// norm-type pinches).
    fn gradient(&self, nu: &[f64]) -> Option<Vec<f64>>;

    fn name(&self) -> String;
}

/// `f(ν) = c |ν|`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledNorm {
    pub scale: f64,
}

impl ScaledNorm {
    pub fn quarter() -> Self {
        ScaledNorm { scale: 0.25 }
    }

    pub fn unit() -> Self {
        ScaledNorm { scale: 1.0 }
    }
}

impl Pinch for ScaledNorm {
    fn value(&self, nu: &[f64]) -> f64 {
        self.scale * nu.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn gradient(&self, nu: &[f64]) -> Option<Vec<f64>> {
        let norm = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        Some(nu.iter().map(|v| self.scale * v / norm).collect())
    }

    fn name(&self) -> String {
        if self.scale == 0.25 {
            "quarter-norm".into()
        } else if self.scale == 1.0 {
            "norm".into()
        } else {
            format!("{}*norm", self.scale)
        }
    }
}

/// `f(ν) = |ν|/4`.
pub fn default_pinch() -> Arc<dyn Pinch> {
    Arc::new(ScaledNorm::quarter())
}

/// Pinch selection by name: `quarter-norm` or `norm`.
pub fn pinch_by_name(name: &str) -> Result<Arc<dyn Pinch>> {
    match name {
        "quarter-norm" => Ok(Arc::new(ScaledNorm::quarter())),
        "norm" => Ok(Arc::new(ScaledNorm::unit())),
        other => Err(Error::invalid(format!(
            "unknown pinch '{other}' (expected quarter-norm or norm)"
        ))),
    }
}

/// Weight `w` of the off-diagonal sum.
///
/// `Single` counts each pair `i < j` once. `Frobenius` counts both `(i,j)`
/// and `(j,i)`, i.e. `w = 2`, which is the Frobenius inner product of the
/// scaled skew matrices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SkewConvention {
    #[default]
    Single,
    Frobenius,
}

impl SkewConvention {
    pub fn weight(self) -> f64 {
        match self {
            SkewConvention::Single => 1.0,
            SkewConvention::Frobenius => 2.0,
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "single" => Ok(SkewConvention::Single),
            "frobenius" => Ok(SkewConvention::Frobenius),
            other => Err(Error::invalid(format!(
                "unknown convention '{other}' (expected single or frobenius)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SkewConvention::Single => "single",
            SkewConvention::Frobenius => "frobenius",
        }
    }
}

/// A pinch function together with the off-diagonal convention.
#[derive(Clone, Debug)]
pub struct PinchedMetric {
    pinch: Arc<dyn Pinch>,
    convention: SkewConvention,
}

impl Default for PinchedMetric {
    fn default() -> Self {
        PinchedMetric::new(default_pinch(), SkewConvention::Single)
    }
}

impl PinchedMetric {
    pub fn new(pinch: Arc<dyn Pinch>, convention: SkewConvention) -> Self {
        PinchedMetric { pinch, convention }
    }

    pub fn pinch(&self) -> &dyn Pinch {
        self.pinch.as_ref()
    }

    pub fn pinch_arc(&self) -> Arc<dyn Pinch> {
        Arc::clone(&self.pinch)
    }

    pub fn convention(&self) -> SkewConvention {
        self.convention
    }

    pub fn weight(&self) -> f64 {
        self.convention.weight()
    }

    /// Upper-triangular matrix of `f(μ_{i→j})`; other entries are zero.
    pub fn pair_values(&self, mu: &[f64]) -> DMatrix<f64> {
        let n = mu.len();
        let mut out = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                out[(i, j)] = self.pinch.value(&slice_raw(mu, i, j));
            }
        }
        out
    }

    /// `g((α,B),(β,C))` at weights `μ`, without the cell check.
    pub(crate) fn eval_raw(&self, mu: &[f64], alpha: &DVector<f64>, b: &DMatrix<f64>,
                           beta: &DVector<f64>, c: &DMatrix<f64>) -> f64 {
        let n = mu.len();
        let mut frame = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if b[(i, j)] != 0.0 && c[(i, j)] != 0.0 {
                    let f = self.pinch.value(&slice_raw(mu, i, j));
                    frame += f * f * b[(i, j)] * c[(i, j)];
                }
            }
        }
        alpha.dot(beta) + self.weight() * frame
    }
}

pub(crate) fn slice_raw(mu: &[f64], i: usize, j: usize) -> Vec<f64> {
    let mut out = vec![0.0; mu.len()];
    out[i..j].copy_from_slice(&mu[i..j]);
    out
}

/// `μ_{i→j}` for the 0-based pair `i < j`: keeps `μ[i..j]` (that is
/// `μ_i, …, μ_{j−1}`) and zeroes the rest.
pub fn mu_slice(mu: &WeightVector, i: usize, j: usize) -> Result<Vec<f64>> {
    let n = mu.n();
    if !(i < j && j < n) {
        return Err(Error::invalid(format!(
            "slice indices must satisfy i < j < {n}, got ({i}, {j})"
        )));
    }
    Ok(slice_raw(mu.as_slice(), i, j))
}

/// Tangent vector `(α, B)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    alpha: DVector<f64>,
    b: DMatrix<f64>,
}

impl TangentVector {
    pub fn new(alpha: Vec<f64>, b: DMatrix<f64>) -> Result<Self> {
        let n = alpha.len();
        let s: f64 = alpha.iter().sum();
        if !(s.abs() <= TANGENT_TOL) {
            return Err(Error::invalid(format!("weight direction sums to {s:e}, not 0")));
        }
        let m = linalg::check_skew(&b, TANGENT_TOL, "frame direction")?;
        if m != n {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        Ok(TangentVector {
            alpha: DVector::from_vec(alpha),
            b,
        })
    }

    pub fn zero(n: usize) -> Self {
        TangentVector {
            alpha: DVector::zeros(n),
            b: DMatrix::zeros(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
}

fn check_in_cell(mu: &WeightVector, t: &TangentVector) -> Result<()> {
    if t.n() != mu.n() {
        return Err(Error::DimensionMismatch {
            expected: mu.n(),
            found: t.n(),
        });
    }
    let ty = flagcore::type_of(mu, flagcore::DEFAULT_ZERO_TOL)?;
    for &(i, j) in stratify::block_indices(&ty).pairs() {
        if t.b[(i, j)].abs() > TANGENT_TOL {
            return Err(Error::invalid(format!(
                "frame direction has entry ({i},{j}) inside a diagonal block of type {ty}"
            )));
        }
    }
    Ok(())
}

/// `g_μ(T1, T2)`. Frame directions must vanish inside the diagonal blocks
/// of `τ(μ)`.
pub fn metric_eval(metric: &PinchedMetric, mu: &WeightVector, t1: &TangentVector, t2: &TangentVector) -> Result<f64> {
    check_in_cell(mu, t1)?;
    check_in_cell(mu, t2)?;
    Ok(metric.eval_raw(mu.as_slice(), &t1.alpha, &t1.b, &t2.alpha, &t2.b))
}

/// Per-interval squared speeds of a sampled path.
fn squared_speeds(samples: &[FlagRep], h: f64, metric: &PinchedMetric,
                  project: Option<&FlagType>) -> Result<Vec<f64>> {
    if samples.len() < 2 {
        return Err(Error::invalid("a sampled path needs at least two samples"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid("time step must be positive"));
    }
    let n = samples[0].n();
    if samples.iter().any(|s| s.n() != n) {
        return Err(Error::invalid("path samples have different dimensions"));
    }
    if let Some(t) = project {
        if t.n() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.n() });
        }
    }
    Ok(samples
        .windows(2)
        .map(|w| {
            let (a, b) = (&w[0], &w[1]);
            let dmu = (b.mu().as_vector() - a.mu().as_vector()) / h;
            let mid: Vec<f64> = (a.mu().as_vector() + b.mu().as_vector())
                .iter()
                .map(|v| 0.5 * v)
                .collect();
            let mut vel = linalg::skew_part(&(a.frame().transpose() * (b.frame() - a.frame()))) / h;
            if let Some(t) = project {
                vel = stratify::horizontal_project_unchecked(&vel, t);
            }
            metric.eval_raw(&mid, &dmu, &vel, &dmu, &vel).max(0.0)
        })
        .collect())
}

/// `L_g` of a path sampled at uniform step `h`, by the midpoint rule with
/// finite-difference velocities.
pub fn path_length(samples: &[FlagRep], h: f64, metric: &PinchedMetric) -> Result<f64> {
    Ok(squared_speeds(samples, h, metric, None)?.iter().map(|s| h * s.sqrt()).sum())
}

/// As [`path_length`], with frame velocities projected onto `𝔪_I`.
pub fn path_length_horizontal(samples: &[FlagRep], h: f64, metric: &PinchedMetric, t: &FlagType) -> Result<f64> {
    Ok(squared_speeds(samples, h, metric, Some(t))?.iter().map(|s| h * s.sqrt()).sum())
}

/// `½ ∫ g(γ′, γ′) dt` by the same quadrature.
pub fn path_energy(samples: &[FlagRep], h: f64, metric: &PinchedMetric) -> Result<f64> {
    Ok(0.5 * squared_speeds(samples, h, metric, None)?.iter().map(|s| h * s).sum::<f64>())
}
