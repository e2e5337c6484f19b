//! Coordinate charts, metrics and the curvature operators built on them.
//!
//! Everything is symbolic: the inverse metric is an adjugate, the
//! Christoffel symbols and curvature tensors are `Expr` arrays. Numeric
//! checks go through [`crate::symexpr::equivalent`] or direct evaluation.

mod chart;
mod curvature;
mod metric;

pub use chart::{Chart, Interval};
pub use curvature::{
    christoffel, gradient_norm_sq, hessian, laplacian, ricci, riemann, scalar_curvature, trace,
    CurvatureBundle, Riemann,
};
pub use metric::{evaluate_matrix, Christoffel, Metric, MAX_DENSE_BLOCK};
