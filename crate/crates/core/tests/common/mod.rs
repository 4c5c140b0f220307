#![allow(dead_code)]

use flagfold::geodesic::{self, GeodesicState, ShootConfig, Trajectory};
use flagfold::riemann::{default_pinch, PinchedMetric, SkewConvention};
use flagfold::WeightVector;
use nalgebra::DMatrix;

/// Initial data of a three-dimensional shooting run. `b` is given as
/// `(b12, b23, b13)`.
pub struct Run {
    pub name: &'static str,
    pub mu0: [f64; 3],
    pub mu_dot0: [f64; 3],
    pub b: [f64; 3],
}

pub const LINE_TO_PLANE: Run = Run {
    name: "line-to-plane",
    mu0: [0.98, 0.01, 0.01],
    mu_dot0: [-1.0, 1.0, 0.0],
    b: [0.05, 0.0, 0.5],
};

pub const COMPLETE_TO_LINE: Run = Run {
    name: "complete-to-line",
    mu0: [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    mu_dot0: [1.0, -0.5, -0.5],
    b: [5.0, 0.0, 0.0],
};

pub const LINE_PLANE_TO_LINE_SPACE: Run = Run {
    name: "line-plane-to-line-space",
    mu0: [0.499, 0.499, 0.002],
    mu_dot0: [0.15, -0.5, 0.35],
    b: [0.5, 0.0, 0.1],
};

pub const LINE_TO_SPACE: Run = Run {
    name: "line-to-space",
    mu0: [0.98, 0.01, 0.01],
    mu_dot0: [-1.0, 0.0, 1.0],
    b: [0.0, 0.0, 0.0],
};

pub const ALL_RUNS: [&Run; 4] = [&LINE_TO_PLANE, &COMPLETE_TO_LINE, &LINE_PLANE_TO_LINE_SPACE, &LINE_TO_SPACE];

/// Quarter-norm pinch with both off-diagonal entries of `B` counted.
pub fn metric() -> PinchedMetric {
    PinchedMetric::new(default_pinch(), SkewConvention::Frobenius)
}

impl Run {
    /// `B₀` strict upper triangle in row-major order `(b12, b13, b23)`.
    pub fn upper(&self) -> [f64; 3] {
        [self.b[0], self.b[2], self.b[1]]
    }

    pub fn initial(&self, metric: &PinchedMetric) -> GeodesicState {
        GeodesicState::initial_upper(
            metric,
            WeightVector::new(self.mu0.to_vec()).unwrap(),
            self.mu_dot0.to_vec(),
            DMatrix::identity(3, 3),
            &self.upper(),
        )
        .unwrap()
    }

    pub fn shoot(&self, metric: &PinchedMetric, h: f64, steps: usize) -> Trajectory {
        geodesic::shoot(metric, &self.initial(metric), &ShootConfig::new(h, steps)).unwrap()
    }
}

/// Largest entry of `|U − V D|` over the best column signs `D`.
pub fn frame_error_up_to_signs(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..u.ncols() {
        let (a, b) = (u.column(j), v.column(j));
        let s = if a.dot(&b) < 0.0 { -1.0 } else { 1.0 };
        worst = worst.max((a - b * s).amax());
    }
    worst
}
