use flagfold::flagcore::{self, CovMatrix};
use flagfold::measures::{
    first_variation, flagfold_to_varifolds, mass, monotonicity_ratio, point_cloud_flagfold, pushforward, samples,
    Affine, FlagAtom, FnField, Kernel, PointCloudFlagfold, WeightedPoints,
};
use nalgebra::{DMatrix, DVector};

fn bump(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    (q * q * (1.0 + 0.5 * t), -4.0 * t * q * (1.0 + 0.5 * t) + 0.5 * q * q)
}

fn odd(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - t * t;
    (t * q * q, q * q - 4.0 * t * t * q)
}

fn atoms_with(points: &WeightedPoints, s: &CovMatrix) -> PointCloudFlagfold {
    let atoms = points.points().iter().map(|(x, m)| FlagAtom { x: x.clone(), s: s.clone(), m: *m }).collect();
    PointCloudFlagfold::new(points.n(), atoms).unwrap()
}

fn diag(v: &[f64]) -> CovMatrix {
    CovMatrix::new(DMatrix::from_diagonal(&DVector::from_row_slice(v))).unwrap()
}

#[test]
fn sampled_line_first_variation_matches_the_tangential_term() {
    // X = (φ(x₁)φ(x₂), φ(x₁)ψ(x₂), 0); on the x₁-axis only μ₂ ∂₂X₂ survives,
    // and ∫ φ = 16/15 since the odd part of φ integrates to zero
    let field = FnField::new(
        3,
        |x: &DVector<f64>| {
            let (a, b, c) = (bump(x[0]).0, bump(x[1]).0, odd(x[1]).0);
            DVector::from_vec(vec![a * b, a * c, 0.0])
        },
        |x: &DVector<f64>| {
            let ((a, da), (b, db), (c, dc)) = (bump(x[0]), bump(x[1]), odd(x[1]));
            DMatrix::from_row_slice(3, 3, &[da * b, a * db, 0.0, da * c, a * dc, 0.0, 0.0, 0.0, 0.0])
        },
    );
    let line = samples::grid_patch(3, 1, 2.0, 4000).unwrap();
    let w = atoms_with(&line, &diag(&[2.0 / 3.0, 1.0 / 3.0, 0.0]));
    let mu2 = 2.0 / 3.0;
    let exact = mu2 * 16.0 / 15.0;
    let got = first_variation(&w, &field).unwrap();
    assert!((got - exact).abs() / exact < 0.01, "{got} vs {exact}");
}

#[test]
fn sampled_line_has_constant_linear_density() {
    let line = samples::grid_patch(3, 1, 0.6, 1200).unwrap();
    let w = atoms_with(&line, &flagcore::embed_grassmannian(&DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0])).unwrap());
    let radii: Vec<f64> = (0..9).map(|k| 0.1 + 0.05 * k as f64).collect();
    for r in monotonicity_ratio(&w, &DVector::zeros(3), 1.0, 0.0, &radii).unwrap() {
        assert!((r / 2.0 - 1.0).abs() < 0.02, "{r}");
    }
}

#[test]
fn local_covariance_of_a_plane_grid_is_the_plane() {
    let plane = samples::grid_patch(3, 2, 1.0, 40).unwrap();
    // η avoids lattice distances so the grid symmetry survives rounding
    let w = point_cloud_flagfold(&plane, 0.33, Kernel::Indicator).unwrap();
    let target = diag(&[0.5, 0.5, 0.0]);
    for a in w.atoms().iter().filter(|a| a.x.amax() < 0.6) {
        assert!((a.s.matrix() - target.matrix()).norm() < 1e-12);
        assert!(a.s.matrix()[(2, 2)] == 0.0);
    }
}

#[test]
fn mixed_atom_splits_into_weighted_levels() {
    let w = PointCloudFlagfold::new(3, vec![FlagAtom { x: DVector::zeros(3), s: diag(&[2.0 / 3.0, 1.0 / 3.0, 0.0]), m: 1.0 }]).unwrap();
    let v1 = flagfold_to_varifolds(&w, 1, flagcore::DEFAULT_ZERO_TOL).unwrap();
    let v2 = flagfold_to_varifolds(&w, 2, flagcore::DEFAULT_ZERO_TOL).unwrap();
    let v3 = flagfold_to_varifolds(&w, 3, flagcore::DEFAULT_ZERO_TOL).unwrap();
    assert!((v1.total_mass() - 1.0 / 3.0).abs() < 1e-12);
    assert!((v2.total_mass() - 2.0 / 3.0).abs() < 1e-12);
    assert!(v3.atoms().is_empty());
    assert!((mass(&w).total_mass() - v1.total_mass() - v2.total_mass()).abs() < 1e-15);
}

#[test]
fn orthogonal_pushforward_keeps_mass_and_first_variation_of_rotated_field() {
    let theta: f64 = 0.7;
    let (c, s) = (theta.cos(), theta.sin());
    let r = DMatrix::from_row_slice(3, 3, &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0]);
    let rot = Affine::new(r.clone(), DVector::from_vec(vec![0.1, 0.2, 0.3])).unwrap();
    let plane = samples::grid_patch(3, 2, 1.0, 10).unwrap();
    let w = atoms_with(&plane, &diag(&[0.6, 0.3, 0.1]));
    let image = pushforward(&w, &rot, flagcore::DEFAULT_ZERO_TOL).unwrap();
    assert!((image.total_mass() - w.total_mass()).abs() < 1e-12);
    // δ(Φ♯W)(X) for X = A y equals δW for the conjugated field RᵀAR x
    let a = DMatrix::from_row_slice(3, 3, &[0.3, -1.0, 0.2, 0.5, 0.1, 0.0, -0.4, 0.7, 0.9]);
    let lhs = first_variation(&image, &Affine::new(a.clone(), DVector::zeros(3)).unwrap()).unwrap();
    let rhs = first_variation(&w, &Affine::new(r.transpose() * a * r, DVector::zeros(3)).unwrap()).unwrap();
    assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
}
