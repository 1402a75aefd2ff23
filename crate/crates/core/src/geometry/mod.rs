//! Chart-based tensor calculus: metrics, Christoffel symbols, curvature and
//! covariant derivatives of ambient vector fields.

mod chart;
mod connection;

pub use chart::{ChartMetric, DomainBox, Interval, JetMap, JetScalar, MetricChart, Signature};
pub use connection::{
    ambient_derivative, christoffel, compatibility_residual, curvature_at, metric_at,
    riemann_from_connection, validate_metric, Christoffel, CurvatureData, MetricDerivs,
};
pub(crate) use connection::jets_to_matrix;

/// `g(x, y)` for a plain matrix.
pub fn inner(g: &nalgebra::DMatrix<f64>, x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += g[(a, b)] * x[a] * y[b];
        }
    }
    s
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}
