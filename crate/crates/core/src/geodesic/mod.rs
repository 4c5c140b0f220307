//! Geodesic shooting for the pinched metric on the interior cell.
//!
//! The frame velocity `B = UᵀU′` is never integrated directly. The matrix
//! `U C Uᵀ`, with `c_ij = f(μ_{i→j})² b_ij`, is constant along geodesics,
//! so each step recovers `B` from the initial momentum and the current
//! `(μ, U)`. The explicit first-order update is
//!
//! ```text
//! μ ← μ + h μ′,   μ′ ← μ′ + h μ″(μ, B),   U ← U exp(h B)
//! ```
//!
//! with all right-hand sides evaluated at the old state.

mod diagnostics;
mod expm;

pub(crate) use diagnostics::frame_angles;
pub use diagnostics::{angle_diagnostics, ellipsoid_frames, euclidean_geodesic, Ellipsoid};
pub use expm::expm_skew;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::flagcore::{self, CovMatrix, FlagRep, WeightVector};
use crate::linalg;
use crate::riemann::{slice_raw, PinchedMetric};

/// Default boundary threshold: integration stops once some `μ_k ≤ MU_MIN`.
pub const MU_MIN: f64 = 1e-3;
/// Default lower bound on pinch values when recovering `B`.
pub const SINGULAR_TOL: f64 = 1e-8;
/// Invariant drift that aborts the integration.
pub const DRIFT_TOL: f64 = 1e-6;
const INIT_TOL: f64 = 1e-12;

/// `μ″` from the geodesic equations:
///
/// ```text
/// μ_k″ = w [ (1/n) Σ_{l≠k} S_l − ((n−1)/n) S_k ],
/// S_l  = Σ_{i ≤ l < j} f(μ_{i→j}) ∂_l f(μ_{i→j}) b_ij²
/// ```
///
/// with `w` the metric's off-diagonal weight. Components sum to zero.
pub fn mu_acceleration(metric: &PinchedMetric, mu: &[f64], b: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = mu.len();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.nrows() });
    }
    if mu.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::invalid("weight acceleration needs all weights positive"));
    }
    let pinch = metric.pinch();
    let mut s = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let bij = b[(i, j)];
            if bij == 0.0 {
                continue;
            }
            let nu = slice_raw(mu, i, j);
            let f = pinch.value(&nu);
            let grad = pinch
                .gradient(&nu)
                .ok_or_else(|| Error::Numerical(format!("pinch gradient undefined on pair ({i},{j})")))?;
            for l in i..j {
                s[l] += f * grad[l] * bij * bij;
            }
        }
    }
    let total: f64 = s.iter().sum();
    let w = metric.weight();
    Ok(DVector::from_fn(n, |k, _| w * (total / n as f64 - s[k])))
}

/// `c_ij = f(μ_{i→j})² b_ij`, skew.
pub fn momentum_coefficients(metric: &PinchedMetric, mu: &[f64], b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = mu.len();
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let f = metric.pinch().value(&slice_raw(mu, i, j));
            c[(i, j)] = f * f * b[(i, j)];
            c[(j, i)] = -c[(i, j)];
        }
    }
    c
}

/// `b_ij = (Uᵀ U₀ C₀ U₀ᵀ U)_ij / f(μ_{i→j})²`.
pub fn recover_b(metric: &PinchedMetric, mu: &[f64], u: &DMatrix<f64>, u0: &DMatrix<f64>,
                 c0: &DMatrix<f64>, singular_tol: f64) -> Result<DMatrix<f64>> {
    let world = u0 * c0 * u0.transpose();
    recover_b_from_world(metric, mu, u, &world, singular_tol)
}

fn recover_b_from_world(metric: &PinchedMetric, mu: &[f64], u: &DMatrix<f64>,
                        world: &DMatrix<f64>, singular_tol: f64) -> Result<DMatrix<f64>> {
    let n = mu.len();
    let body = u.transpose() * world * u;
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let f = metric.pinch().value(&slice_raw(mu, i, j));
            if !(f > singular_tol) {
                return Err(Error::SingularPinch { i, j, value: f, tol: singular_tol });
            }
            // antisymmetrize to cancel rounding in the conjugation
            let k = 0.5 * (body[(i, j)] - body[(j, i)]);
            b[(i, j)] = k / (f * f);
            b[(j, i)] = -b[(i, j)];
        }
    }
    Ok(b)
}

/// One point of a geodesic: weights, their velocity, the frame, the frame
/// velocity `B` and the initial momentum coefficients `C₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicState {
    pub t: f64,
    pub mu: DVector<f64>,
    pub mu_dot: DVector<f64>,
    pub frame: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c0: DMatrix<f64>,
}

impl GeodesicState {
    /// Initial state at `t = 0`. `C₀` is computed from `B₀`.
    pub fn initial(metric: &PinchedMetric, mu: WeightVector, mu_dot: Vec<f64>, frame: DMatrix<f64>,
                   b0: DMatrix<f64>) -> Result<Self> {
        let n = mu.n();
        if mu_dot.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: mu_dot.len() });
        }
        let s: f64 = mu_dot.iter().sum();
        if !(s.abs() <= INIT_TOL) || mu_dot.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("initial weight velocity must sum to 0, got {s:e}")));
        }
        let rep = FlagRep::new(mu, frame)?;
        let m = linalg::check_skew(&b0, INIT_TOL, "initial frame velocity")?;
        if m != n {
            return Err(Error::DimensionMismatch { expected: n, found: m });
        }
        let b0 = linalg::skew_part(&b0);
        let mu = rep.mu().as_vector().clone();
        let c0 = momentum_coefficients(metric, mu.as_slice(), &b0);
        Ok(GeodesicState {
            t: 0.0,
            mu,
            mu_dot: DVector::from_vec(mu_dot),
            frame: rep.frame().clone(),
            b: b0,
            c0,
        })
    }

    /// As [`GeodesicState::initial`], with `B₀` given by its strict upper
    /// triangle in row-major order (`b_12, b_13, …, b_1n, b_23, …`).
    pub fn initial_upper(metric: &PinchedMetric, mu: WeightVector, mu_dot: Vec<f64>, frame: DMatrix<f64>,
                         upper: &[f64]) -> Result<Self> {
        let n = mu.n();
        Self::initial(metric, mu, mu_dot, frame, skew_from_upper(n, upper)?)
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// `(μ, U)` as a flag representative, with the weights renormalized.
    pub fn flag_rep(&self) -> Result<FlagRep> {
        let mut v: Vec<f64> = self.mu.iter().map(|x| x.max(0.0)).collect();
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        let residue = 1.0 - v.iter().sum::<f64>();
        v[0] += residue;
        let mu = WeightVector::new(v)?;
        let defect = linalg::orthonormality_defect(&self.frame);
        if defect <= flagcore::FRAME_TOL {
            FlagRep::new(mu, self.frame.clone())
        } else {
            // re-orthonormalize drifted frames through the polar factor
            let svd = self.frame.clone().svd(true, true);
            let q = svd.u.unwrap() * svd.v_t.unwrap();
            FlagRep::new(mu, q)
        }
    }

    /// `λ(μ)`.
    pub fn lambda(&self) -> DVector<f64> {
        flagcore::lambda_from_mu_raw(self.mu.as_slice())
    }

    pub fn cov(&self) -> Result<CovMatrix> {
        Ok(self.flag_rep()?.compose())
    }
}

/// Skew matrix from its strict upper triangle, row-major.
pub fn skew_from_upper(n: usize, upper: &[f64]) -> Result<DMatrix<f64>> {
    let expect = n * (n - 1) / 2;
    if upper.len() != expect {
        return Err(Error::invalid(format!(
            "expected {expect} upper-triangle entries for n = {n}, got {}",
            upper.len()
        )));
    }
    let mut b = DMatrix::zeros(n, n);
    let mut it = upper.iter();
    for i in 0..n {
        for j in i + 1..n {
            let v = *it.next().expect("length checked");
            b[(i, j)] = v;
            b[(j, i)] = -v;
        }
    }
    Ok(b)
}

/// `U C Uᵀ` with `C = (f(μ_{i→j})² b_ij)`.
pub fn conserved_momentum(metric: &PinchedMetric, state: &GeodesicState) -> DMatrix<f64> {
    let c = momentum_coefficients(metric, state.mu.as_slice(), &state.b);
    &state.frame * c * state.frame.transpose()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Termination {
    HorizonReached,
    /// Weight `index` (0-based) fell to `mu_min` or below.
    BoundaryHit { index: usize },
    StepFailure(String),
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::HorizonReached => "horizon_reached",
            Termination::BoundaryHit { .. } => "boundary_hit",
            Termination::StepFailure(_) => "step_failure",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShootConfig {
    pub h: f64,
    pub max_steps: usize,
    pub mu_min: f64,
    pub singular_tol: f64,
}

impl ShootConfig {
    pub fn new(h: f64, max_steps: usize) -> Self {
        ShootConfig { h, max_steps, mu_min: MU_MIN, singular_tol: SINGULAR_TOL }
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::invalid("step h must be positive and finite"));
        }
        if !(self.mu_min >= 0.0 && self.mu_min < 1.0) {
            return Err(Error::invalid("mu_min must lie in [0, 1)"));
        }
        if !(self.singular_tol >= 0.0) {
            return Err(Error::invalid("singular_tol must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub h: f64,
    pub states: Vec<GeodesicState>,
    pub termination: Termination,
    /// `U₀ C₀ U₀ᵀ`.
    pub momentum: DMatrix<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.states.last().expect("trajectories are non-empty")
    }

    /// Index of the state closest to `target` in the ℓ∞ norm on `μ`, with
    /// that distance. Ties keep the earliest state.
    pub fn closest_to(&self, target: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (p, s) in self.states.iter().enumerate() {
            let d = s.mu.iter().zip(target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if d < best.1 {
                best = (p, d);
            }
        }
        best
    }

    /// Index of the state whose time is closest to `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let p = (t / self.h).round().max(0.0) as usize;
        p.min(self.states.len() - 1)
    }

    /// Largest `‖U C Uᵀ − U₀ C₀ U₀ᵀ‖_F` along the trajectory.
    pub fn momentum_drift(&self, metric: &PinchedMetric) -> f64 {
        self.states
            .iter()
            .map(|s| (conserved_momentum(metric, s) - &self.momentum).norm())
            .fold(0.0, f64::max)
    }
}

fn drift(state: &GeodesicState) -> Option<String> {
    let s = (state.mu.sum() - 1.0).abs();
    let v = state.mu_dot.sum().abs();
    let o = linalg::orthonormality_defect(&state.frame);
    if !(s <= DRIFT_TOL && v <= DRIFT_TOL && o <= DRIFT_TOL) {
        return Some(format!(
            "invariant drift at t = {}: |Σμ−1| = {s:e}, |Σμ′| = {v:e}, ‖UᵀU−I‖ = {o:e}",
            state.t
        ));
    }
    None
}

/// Integrates the geodesic from `init` for at most `cfg.max_steps` steps.
///
/// Stops with [`Termination::BoundaryHit`] as soon as a weight reaches
/// `cfg.mu_min`; the boundary state is the last one stored. Singular
/// recoveries and invariant drift end the run with
/// [`Termination::StepFailure`].
pub fn shoot(metric: &PinchedMetric, init: &GeodesicState, cfg: &ShootConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if let Some(k) = init.mu.iter().position(|&m| m <= cfg.mu_min) {
        return Err(Error::invalid(format!(
            "initial weight μ_{} = {} is not above mu_min = {}",
            k + 1,
            init.mu[k],
            cfg.mu_min
        )));
    }
    let momentum = &init.frame * &init.c0 * init.frame.transpose();
    let h = cfg.h;
    let mut states = Vec::with_capacity(cfg.max_steps.min(1 << 20) + 1);
    let mut cur = init.clone();
    cur.b = recover_b_from_world(metric, cur.mu.as_slice(), &cur.frame, &momentum, cfg.singular_tol)?;
    states.push(cur.clone());
    let mut termination = Termination::HorizonReached;
    for p in 0..cfg.max_steps {
        let acc = match mu_acceleration(metric, cur.mu.as_slice(), &cur.b) {
            Ok(a) => a,
            Err(e) => {
                termination = Termination::StepFailure(e.to_string());
                break;
            }
        };
        let rot = expm_skew(&(&cur.b * h))?;
        let mut next = GeodesicState {
            t: (p + 1) as f64 * h,
            mu: &cur.mu + &cur.mu_dot * h,
            mu_dot: &cur.mu_dot + acc * h,
            frame: &cur.frame * rot,
            b: cur.b.clone(),
            c0: cur.c0.clone(),
        };
        if let Some(msg) = drift(&next) {
            states.push(next);
            termination = Termination::StepFailure(msg);
            break;
        }
        if let Some(index) = next.mu.iter().position(|&m| m <= cfg.mu_min) {
            // best effort: the pinch may already be too small to recover B
            if let Ok(b) = recover_b_from_world(metric, next.mu.as_slice(), &next.frame, &momentum, cfg.singular_tol) {
                next.b = b;
            }
            states.push(next);
            termination = Termination::BoundaryHit { index };
            break;
        }
        match recover_b_from_world(metric, next.mu.as_slice(), &next.frame, &momentum, cfg.singular_tol) {
            Ok(b) => next.b = b,
            Err(e) => {
                states.push(next);
                termination = Termination::StepFailure(e.to_string());
                break;
            }
        }
        states.push(next.clone());
        cur = next;
    }
    Ok(Trajectory { h, states, termination, momentum })
}
