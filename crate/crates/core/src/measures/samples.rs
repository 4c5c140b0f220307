//! Point clouds for demonstrations and quadrature.

use nalgebra::DVector;
use rand::Rng;

use super::WeightedPoints;
use crate::error::{Error, Result};

/// Midpoints of a uniform `m × … × m` grid on `[−a, a]^d`, embedded in the
/// first `d` coordinates of `ℝⁿ`. Each point carries its cell volume, so
/// the point set approximates `H^d` on the patch.
pub fn grid_patch(n: usize, d: usize, half_width: f64, m: usize) -> Result<WeightedPoints> {
    if d == 0 || d > n || m == 0 {
        return Err(Error::invalid("grid needs 1 ≤ d ≤ n and at least one cell"));
    }
    if !(half_width > 0.0) {
        return Err(Error::invalid("grid half width must be positive"));
    }
    let h = 2.0 * half_width / m as f64;
    let vol = h.powi(d as i32);
    let total = m.pow(d as u32);
    let mut points = Vec::with_capacity(total);
    for idx in 0..total {
        let mut rest = idx;
        let mut x = DVector::zeros(n);
        for k in 0..d {
            x[k] = -half_width + h * ((rest % m) as f64 + 0.5);
            rest /= m;
        }
        points.push((x, vol));
    }
    WeightedPoints::new(n, points)
}

/// Uniform samples of the solid cylinder `x₁² + x₂² ≤ ε²`, `|x₃| ≤ half_height`,
/// with total mass equal to the length `2·half_height` (unit line density).
pub fn solid_cylinder<R: Rng + ?Sized>(rng: &mut R, count: usize, radius: f64, half_height: f64) -> Result<WeightedPoints> {
    if count == 0 || !(radius > 0.0) || !(half_height > 0.0) {
        return Err(Error::invalid("cylinder needs positive radius, height and count"));
    }
    let m = 2.0 * half_height / count as f64;
    let points = (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = std::f64::consts::TAU * rng.random::<f64>();
            let z = half_height * (2.0 * rng.random::<f64>() - 1.0);
            (DVector::from_vec(vec![r * t.cos(), r * t.sin(), z]), m)
        })
        .collect();
    WeightedPoints::new(3, points)
}

/// Uniform samples of the sphere of radius `r` in `ℝⁿ`, unit masses.
pub fn sphere<R: Rng + ?Sized>(rng: &mut R, n: usize, count: usize, r: f64) -> Result<WeightedPoints> {
    let pts = (0..count)
        .map(|_| DVector::from_vec(crate::sampling::random_unit_vector(rng, n)) * r)
        .collect();
    WeightedPoints::unit(n, pts)
}
