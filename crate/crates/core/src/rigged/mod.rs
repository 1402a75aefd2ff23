//! The rigged Riemannian manifold `(M, g̃)`: its geodesics, completeness
//! probes, and curvature relations with the null geometry.

mod chart;
mod geodesic;
mod relations;

pub use chart::{rigged_metric_chart, RiggedMetricChart};
pub use geodesic::{
    closed_geodesic_search, completeness_probe, geodesic_integrate, probe_initial_conditions,
    ClosedGeodesic, ClosedSearchReport, ClosedSearchSpec, EscapeEvent, ExitData, GeodesicOptions,
    GeodesicResult, GeodesicStatus, ProbeReport, ProbeSpec, ProbeVerdict,
};
pub use relations::{
    divergence_check_at, gradient_identity_at, hessian_convexity_check, mean_curvature_bound_check,
    mixed_ricci_at, push_at, raychaudhuri_residual_at, rigged_curvature_at,
    screen_sectional_default_at, screen_sectional_relation_at, umbilic_bound_arithmetic,
    BoundReport, BoundSample, BoundTolerances, BoundVerdict, Definiteness, DivergenceCheck,
    GradientCheck, HessianReport, LeafRoute, MixedRicci, Raychaudhuri, ScreenSectional,
};
