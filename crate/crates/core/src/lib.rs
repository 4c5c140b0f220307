//! Weighted flags and flagfolds.
//!
//! A weighted flag is a trace-one positive-semidefinite matrix viewed through
//! its eigen-decomposition: nested eigenspaces weighted by the simplex
//! weights `μ`. This crate provides the algebra of that correspondence,
//! distances, a pinched Riemannian metric with geodesic shooting, and a
//! measure layer over point clouds that generalizes varifolds to varying
//! dimension.

pub mod cli;
pub mod distances;
pub mod error;
pub mod flagcore;
pub mod geodesic;
pub mod linalg;
pub mod measures;
pub mod riemann;
pub mod sampling;
pub mod stratify;

pub use error::{Error, Result};
pub use flagcore::{CovMatrix, EigenWeights, FlagRep, FlagType, WeightVector};
