use nalgebra::{DMatrix, DVector};

use super::{check_position, FlagAtom, PointCloudFlagfold, WeightedPoints};
use crate::error::{Error, Result};
use crate::flagcore::CovMatrix;

/// Even profile `ω` supported in `(−1, 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Kernel {
    /// `1_{(−1,1)}`.
    #[default]
    Indicator,
    /// `exp(1 − 1/(1 − t²))` on `(−1, 1)`, smooth, equal to 1 at 0.
    Smooth,
}

impl Kernel {
    pub fn profile(self, t: f64) -> f64 {
        let t = t.abs();
        if t >= 1.0 {
            return 0.0;
        }
        match self {
            Kernel::Indicator => 1.0,
            Kernel::Smooth => (1.0 - 1.0 / (1.0 - t * t)).exp(),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "indicator" => Ok(Kernel::Indicator),
            "smooth" => Ok(Kernel::Smooth),
            other => Err(Error::invalid(format!(
                "unknown kernel '{other}' (expected indicator or smooth)"
            ))),
        }
    }
}

/// `Σ_η(x)`: kernel-weighted second moments of the normalized offsets
/// `(y − x)/η`, divided by their weighted squared norms.
pub fn local_covariance(points: &WeightedPoints, x: &DVector<f64>, eta: f64, kernel: Kernel) -> Result<CovMatrix> {
    let n = points.n();
    check_position(x, n)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta must be positive and finite"));
    }
    let mut num = DMatrix::zeros(n, n);
    let mut den = 0.0;
    for (y, m) in points.points() {
        let z = (y - x) / eta;
        let r2 = z.norm_squared();
        if r2 == 0.0 || *m == 0.0 {
            continue;
        }
        let wgt = kernel.profile(r2.sqrt()) * m;
        if wgt == 0.0 {
            continue;
        }
        num.ger(wgt, &z, &z, 1.0);
        den += wgt * r2;
    }
    if !(den > 0.0) {
        return Err(Error::EmptyNeighborhood { eta });
    }
    let s = num / den;
    Ok(CovMatrix::from_trusted((&s + s.transpose()) * 0.5))
}

/// One atom per point, carrying its local covariance at scale `eta`.
pub fn point_cloud_flagfold(points: &WeightedPoints, eta: f64, kernel: Kernel) -> Result<PointCloudFlagfold> {
    let atoms = points
        .points()
        .iter()
        .map(|(x, m)| {
            Ok(FlagAtom {
                x: x.clone(),
                s: local_covariance(points, x, eta, kernel)?,
                m: *m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    PointCloudFlagfold::new(points.n(), atoms)
}
