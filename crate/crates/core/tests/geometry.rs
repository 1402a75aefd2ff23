mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use common::*;
use nullrig::geometry::*;
use nullrig::models::*;
use nullrig::Jet;
use proptest::prelude::*;

fn grw(warp: WarpSpec, fiber: FiberSpec) -> Spacetime {
    make_spacetime(&SpacetimeSpec::Grw { warp, fiber }).unwrap()
}

#[test]
fn sphere_christoffel_and_curvature() {
    let s = round_sphere(1.0);
    for &(th, ph) in &[(0.4, 0.1), (1.2, 3.0), (2.5, 5.5)] {
        let g = christoffel(&s, &[th, ph]).unwrap();
        assert_relative_eq!(g.get(0, 1, 1), -th.sin() * th.cos(), epsilon = 1e-14);
        assert_relative_eq!(g.get(1, 0, 1), th.cos() / th.sin(), epsilon = 1e-13);
        assert_relative_eq!(g.get(1, 1, 0), th.cos() / th.sin(), epsilon = 1e-13);
        let c = curvature_at(&s, &[th, ph]).unwrap();
        assert_relative_eq!(c.sectional(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(c.ricci[(0, 0)], 1.0, epsilon = 1e-12);
    }
    let c = curvature_at(&round_sphere(3.0), &[1.0, 1.0]).unwrap();
    assert_relative_eq!(c.sectional(&[0.3, 1.0], &[1.0, -0.2]).unwrap(), 1.0 / 9.0, epsilon = 1e-12);
}

#[test]
fn grw_exp_christoffel_matches_finite_differences() {
    let st = grw(WarpSpec::Exp, FiberSpec::Flat { dim: 2 });
    let p = [0.3, -0.7, 1.1];
    let g = christoffel(st.chart.as_ref(), &p).unwrap();
    let e2t = (2.0 * p[0]).exp();
    assert_relative_eq!(g.get(0, 1, 1), e2t, epsilon = 1e-12);
    assert_relative_eq!(g.get(1, 0, 1), 1.0, epsilon = 1e-12);
    let fd = fd_christoffel(st.chart.as_ref(), &p, 1e-3);
    let n = 3;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                assert!((g.get(a, b, c) - fd[(a * n + b) * n + c]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn riemann_matches_finite_differences_on_curved_charts() {
    let charts: Vec<(Arc<MetricChart>, Vec<f64>)> = vec![
        (grw(WarpSpec::T2plus1, FiberSpec::Sphere { c: 1.0, dim: 2 }).chart, vec![0.4, 1.0, 0.5]),
        (grw(WarpSpec::Cosh, FiberSpec::Hyperbolic { c: -1.0, dim: 3 }).chart, vec![-0.2, 0.3, 0.9, 0.4]),
        (Arc::new(round_sphere(1.5)), vec![0.9, 2.0]),
    ];
    for (chart, p) in charts {
        let c = curvature_at(chart.as_ref(), &p).unwrap();
        let fd = fd_riemann(chart.as_ref(), &p, 1e-3);
        assert!(max_diff(&c.riemann, &fd) < 1e-8, "{}: {}", chart.name(), max_diff(&c.riemann, &fd));
        assert!(c.antisymmetry_residual() < 1e-12);
        assert!(c.bianchi_residual() < 1e-12);
    }
}

fn rw_sectional(c: f64, warp: WarpSpec, p: &[f64]) {
    let st = make_spacetime(&SpacetimeSpec::RobertsonWalker { c, warp: warp.clone() }).unwrap();
    let w = Warp::new(warp).unwrap();
    let d = w.derivatives(p[0], 2);
    let (f, fp, fpp) = (d[0], d[1], d[2]);
    let cd = curvature_at(st.chart.as_ref(), p).unwrap();
    let e = |i: usize| {
        let mut v = vec![0.0; 4];
        v[i] = 1.0;
        v
    };
    // fiber planes: (c + f'^2)/f^2; planes through dt: f''/f
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        assert_relative_eq!(cd.sectional(&e(i), &e(j)).unwrap(), (c + fp * fp) / (f * f), epsilon = 1e-10, max_relative = 1e-10);
    }
    for i in 1..4 {
        assert_relative_eq!(cd.sectional(&e(0), &e(i)).unwrap(), fpp / f, epsilon = 1e-10, max_relative = 1e-10);
    }
}

#[test]
fn robertson_walker_sectional_curvatures() {
    rw_sectional(0.0, WarpSpec::Exp, &[0.3, 0.1, -0.4, 0.9]);
    rw_sectional(1.0, WarpSpec::Cosh, &[0.5, 1.0, 1.2, 2.0]);
    rw_sectional(-1.0, WarpSpec::T2plus1, &[-0.6, 0.7, 0.4, 1.0]);
}

#[test]
fn expression_warp_matches_catalog_warp() {
    let a = grw(WarpSpec::Exp, FiberSpec::Flat { dim: 2 });
    let b = grw(
        WarpSpec::Expr { expr: "exp(t)".into(), lo: f64::NEG_INFINITY, hi: f64::INFINITY },
        FiberSpec::Flat { dim: 2 },
    );
    let p = [0.2, 0.5, -0.5];
    let ca = curvature_at(a.chart.as_ref(), &p).unwrap();
    let cb = curvature_at(b.chart.as_ref(), &p).unwrap();
    assert!(max_diff(&ca.riemann, &cb.riemann) < 1e-12);
}

#[test]
fn minkowski_is_flat_and_lorentzian() {
    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 4 }).unwrap();
    let c = curvature_at(st.chart.as_ref(), &[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert_eq!(c.max_abs(), 0.0);
    assert!(validate_metric(&c.metric, Signature::Lorentzian, &[0.0; 4]).is_ok());
    assert!(validate_metric(&c.metric, Signature::Riemannian, &[0.0; 4]).is_err());
}

#[test]
fn domain_and_degeneracy_are_reported() {
    let s = round_sphere(1.0);
    assert!(matches!(metric_at(&s, &[-0.1, 0.0]), Err(nullrig::Error::OutsideDomain { .. })));
    let metric: JetMap = Arc::new(|x: &[Jet]| vec![Jet::constant(1.0), Jet::constant(0.0), Jet::constant(0.0), &x[0] * &x[0]]);
    let c = MetricChart::new("cone", vec!["a".into(), "b".into()], DomainBox::unbounded(2), Signature::Riemannian, metric);
    assert!(matches!(metric_at(&c, &[0.0, 1.0]), Err(nullrig::Error::DegenerateMetric { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curvature_symmetries_hold(t in -0.8f64..0.8, x in 0.3f64..2.5, y in 0.2f64..2.9, z in -1.0f64..6.0) {
        let st = grw(WarpSpec::Cosh, FiberSpec::Sphere { c: 2.0, dim: 3 });
        let c = curvature_at(st.chart.as_ref(), &[t, x, y, z]).unwrap();
        prop_assert!(c.antisymmetry_residual() < 1e-10);
        prop_assert!(c.bianchi_residual() < 1e-10);
        prop_assert!(c.christoffel.torsion_residual() < 1e-14);
        prop_assert!(compatibility_residual(st.chart.as_ref(), &[t, x, y, z]).unwrap() < 1e-12);
        let r = &c.ricci;
        prop_assert!((r - r.transpose()).amax() < 1e-10);
    }
}
