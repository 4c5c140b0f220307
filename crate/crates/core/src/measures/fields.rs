//! Vector fields and maps with analytic Jacobians.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A `C¹` vector field `X : ℝⁿ → ℝⁿ` with its Jacobian `DX`.
pub trait VectorField {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// A `C¹` map `Φ : ℝⁿ → ℝⁿ` with its Jacobian `DΦ`.
pub trait SmoothMap {
    fn dim(&self) -> usize;
    fn value(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
}

/// Field or map from a pair of closures.
pub struct FnField<F, G> {
    n: usize,
    value: F,
    jacobian: G,
}

impl<F, G> FnField<F, G>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    pub fn new(n: usize, value: F, jacobian: G) -> Self {
        FnField { n, value, jacobian }
    }
}

impl<F, G> VectorField for FnField<F, G>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.value)(x)
    }
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.jacobian)(x)
    }
}

impl<F, G> SmoothMap for FnField<F, G>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    G: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        (self.value)(x)
    }
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.jacobian)(x)
    }
}

/// `x ↦ A x + c`, usable both as a field and as a map.
#[derive(Clone, Debug, PartialEq)]
pub struct Affine {
    pub a: DMatrix<f64>,
    pub c: DVector<f64>,
}

impl Affine {
    pub fn new(a: DMatrix<f64>, c: DVector<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() || a.nrows() != c.len() {
            return Err(Error::invalid("affine map needs a square matrix and a matching offset"));
        }
        Ok(Affine { a, c })
    }

    pub fn identity(n: usize) -> Self {
        Affine { a: DMatrix::identity(n, n), c: DVector::zeros(n) }
    }
}

impl VectorField for Affine {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.c
    }
    fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
        self.a.clone()
    }
}

impl SmoothMap for Affine {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x + &self.c
    }
    fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
        self.a.clone()
    }
}

/// `X(x) = s (x − center)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Radial {
    pub center: DVector<f64>,
    pub scale: f64,
}

impl VectorField for Radial {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        (x - &self.center) * self.scale
    }
    fn jacobian(&self, _: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(self.center.len(), self.center.len()) * self.scale
    }
}

/// Compactly supported single-component field
/// `X(x) = a · Π_k φ((x_k − c_k)/r) e_i` with `φ(t) = (1 − t²)²` on `|t| < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub component: usize,
    pub center: DVector<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(component: usize, center: DVector<f64>, radius: f64, amplitude: f64) -> Result<Self> {
        if component >= center.len() {
            return Err(Error::invalid(format!(
                "bump component {component} outside 0..{}",
                center.len()
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid("bump radius must be positive"));
        }
        Ok(Bump { component, center, radius, amplitude })
    }

    fn profile(t: f64) -> (f64, f64) {
        if t.abs() >= 1.0 {
            return (0.0, 0.0);
        }
        let u = 1.0 - t * t;
        (u * u, -4.0 * t * u)
    }

    fn factors(&self, x: &DVector<f64>) -> Vec<(f64, f64)> {
        x.iter()
            .zip(self.center.iter())
            .map(|(xi, ci)| Self::profile((xi - ci) / self.radius))
            .collect()
    }
}

impl VectorField for Bump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = self.center.len();
        let v: f64 = self.factors(x).iter().map(|p| p.0).product();
        let mut out = DVector::zeros(n);
        out[self.component] = self.amplitude * v;
        out
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.center.len();
        let fac = self.factors(x);
        let mut out = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut d = fac[k].1 / self.radius;
            for (l, p) in fac.iter().enumerate() {
                if l != k {
                    d *= p.0;
                }
            }
            out[(self.component, k)] = self.amplitude * d;
        }
        out
    }
}

/// Central-difference check of a Jacobian: largest entrywise error
/// relative to `max(1, |DX|max)`.
pub fn jacobian_defect<F: VectorField + ?Sized>(field: &F, x: &DVector<f64>, eps: f64) -> f64 {
    let n = field.dim();
    let jac = field.jacobian(x);
    let mut fd = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut p = x.clone();
        let mut m = x.clone();
        p[k] += eps;
        m[k] -= eps;
        let col = (field.value(&p) - field.value(&m)) / (2.0 * eps);
        fd.set_column(k, &col);
    }
    (fd - &jac).amax() / jac.amax().max(1.0)
}
