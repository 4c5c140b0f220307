mod common;

use common::*;
use flagfold::flagcore::{CovMatrix, FlagRep, WeightVector};
use flagfold::geodesic::{self, conserved_momentum, euclidean_geodesic, GeodesicState, ShootConfig, Termination};
use flagfold::riemann::{default_pinch, PinchedMetric, SkewConvention};
use nalgebra::DMatrix;

#[test]
fn complete_flag_collapses_to_a_line_in_a_fixed_plane() {
    let m = metric();
    let traj = COMPLETE_TO_LINE.shoot(&m, 1e-3, 10_000);
    assert!(matches!(traj.termination, Termination::BoundaryHit { .. }));
    let last = traj.last();
    assert!((last.mu[0] - 1.0).abs() < 5e-3, "{:?}", last.mu);
    for s in &traj.states {
        assert!((s.frame.column(2) - nalgebra::DVector::from_vec(vec![0.0, 0.0, 1.0])).amax() < 1e-12);
    }
    let caption = DMatrix::from_row_slice(3, 3, &[0.373, 0.928, 0.0, -0.928, 0.373, 0.0, 0.0, 0.0, 1.0]);
    assert!(frame_error_up_to_signs(&last.frame, &caption) < 5e-3);
}

#[test]
fn line_plane_run_passes_the_reported_point() {
    let m = metric();
    let traj = LINE_PLANE_TO_LINE_SPACE.shoot(&m, 1e-3, 10_000);
    let (idx, dist) = traj.closest_to(&[0.643, 0.008, 0.349]);
    assert!(dist < 5e-3, "closest distance {dist}");
    let caption = DMatrix::from_row_slice(3, 3, &[
        0.921, 0.118, 0.371,
        -0.372, 0.549, 0.749,
        -0.115, -0.827, 0.55,
    ]);
    assert!(frame_error_up_to_signs(&traj.states[idx].frame, &caption) < 5e-3);
}

#[test]
fn small_weights_stay_small_along_the_line_to_plane_run() {
    // μ₃ is convex, so it stays below the larger of its endpoint values
    let m = metric();
    let traj = LINE_TO_PLANE.shoot(&m, 1e-3, 10_000);
    let (idx, _) = traj.closest_to(&[0.028, 0.95, 0.023]);
    let end = traj.states[idx].mu[2].max(traj.states[0].mu[2]);
    assert!(traj.states[..=idx].iter().all(|s| s.mu[2] <= end + 1e-12));
}

#[test]
fn euclidean_segment_leaves_the_plane_stratum() {
    let m = metric();
    let traj = LINE_TO_PLANE.shoot(&m, 1e-3, 10_000);
    let (idx, _) = traj.closest_to(&[0.028, 0.95, 0.023]);
    let a0 = traj.states[0].cov().unwrap();
    let a1 = traj.states[idx].cov().unwrap();
    let path = euclidean_geodesic(&a0, &a1, 100).unwrap();
    let l3 = |r: &FlagRep| r.lambda().as_slice()[2];
    let ends = l3(&path[0]).max(l3(&path[100]));
    let peak = path.iter().map(l3).fold(0.0, f64::max);
    assert!(peak > 2.0 * ends, "peak λ₃ {peak} vs endpoints {ends}");
}

#[test]
fn resting_frames_carry_zero_momentum() {
    let m = metric();
    let traj = LINE_TO_SPACE.shoot(&m, 1e-3, 10_000);
    for s in &traj.states {
        assert_eq!(conserved_momentum(&m, s), DMatrix::zeros(3, 3));
    }
    assert_eq!(traj.momentum_drift(&m), 0.0);
}

#[test]
fn both_conventions_conserve_momentum() {
    for conv in [SkewConvention::Single, SkewConvention::Frobenius] {
        let m = PinchedMetric::new(default_pinch(), conv);
        let traj = LINE_TO_PLANE.shoot(&m, 1e-3, 10_000);
        assert!(traj.momentum_drift(&m) < 1e-11);
    }
}

#[test]
fn single_convention_misses_the_reported_point() {
    // the reported trajectory needs both off-diagonal entries counted
    let m = PinchedMetric::new(default_pinch(), SkewConvention::Single);
    let traj = LINE_TO_PLANE.shoot(&m, 1e-3, 10_000);
    let (_, dist) = traj.closest_to(&[0.028, 0.95, 0.023]);
    assert!(dist > 5e-3, "{dist}");
}

#[test]
fn four_dimensional_run_keeps_invariants() {
    let m = metric();
    let frame = geodesic::expm_skew(&geodesic::skew_from_upper(4, &[0.3, -0.2, 0.1, 0.4, 0.0, -0.5]).unwrap()).unwrap();
    let init = GeodesicState::initial_upper(
        &m,
        WeightVector::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        vec![0.1, -0.2, 0.05, 0.05],
        frame,
        &[0.5, 0.1, 0.0, 0.3, 0.2, 0.1],
    )
    .unwrap();
    let traj = geodesic::shoot(&m, &init, &ShootConfig::new(1e-3, 2000)).unwrap();
    assert!(traj.states.len() > 10);
    for w in traj.states.windows(3) {
        assert!((w[2].mu.sum() - 1.0).abs() < 1e-12);
        assert!(w[2].mu_dot.sum().abs() < 1e-12);
        assert!(w[2].mu[3] - 2.0 * w[1].mu[3] + w[0].mu[3] >= -1e-12);
    }
    assert!(traj.momentum_drift(&m) < 1e-11);
}

#[test]
fn boundary_state_is_last() {
    let m = metric();
    let cfg = ShootConfig { mu_min: 0.005, ..ShootConfig::new(1e-3, 10_000) };
    let traj = geodesic::shoot(&m, &LINE_TO_SPACE.initial(&m), &cfg).unwrap();
    assert_eq!(traj.termination, Termination::BoundaryHit { index: 0 });
    assert!(traj.last().mu[0] <= 0.005);
    assert!(traj.states[..traj.states.len() - 1].iter().all(|s| s.mu[0] > 0.005));
}

#[test]
fn euclidean_geodesic_is_constant_between_equal_ends() {
    let s = CovMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.5, 0.3, 0.2]))).unwrap();
    for rep in euclidean_geodesic(&s, &s, 10).unwrap() {
        assert!((rep.compose().matrix() - s.matrix()).norm() < 1e-14);
    }
}
