mod common;

use std::f64::consts::{PI, TAU};

use approx::assert_relative_eq;
use common::*;
use nullrig::geometry::{ChartMetric, DomainBox, Interval};
use nullrig::hypersurface::Immersion;
use nullrig::models::*;
use nullrig::rigged::*;
use nullrig::rigging::{rigged_structure_at, RiggingField};
use nullrig::sampling::SampleSpec;
use nullrig::shape::shape_at;
use proptest::prelude::*;

fn setup(st: SpacetimeSpec, hs: HypersurfaceSpec, rig: &str) -> (Immersion, RiggingField) {
    let st = make_spacetime(&st).unwrap();
    let imm = make_hypersurface(&hs, &st).unwrap();
    let r = make_rigging(rig, &st).unwrap();
    (imm, r)
}

fn lightcone(dim: usize, rig: &str) -> (Immersion, RiggingField) {
    setup(SpacetimeSpec::Minkowski { dim }, HypersurfaceSpec::Lightcone { vertex: None }, rig)
}

fn grw_graph(warp: WarpSpec, dim: usize, profile: Profile, rig: &str) -> (Immersion, RiggingField) {
    setup(
        SpacetimeSpec::Grw { warp, fiber: FiberSpec::Flat { dim } },
        HypersurfaceSpec::GrwNullGraph { profile, s0: 0.0, direction: None, extent: None },
        rig,
    )
}

#[test]
fn straight_lines_in_flat_space() {
    let chart = flat_chart(DomainBox::unbounded(3));
    let g = geodesic_integrate(&chart, &[1.0, 0.0, -1.0], &[0.3, -0.4, 1.2], 5.0, &GeodesicOptions::default()).unwrap();
    assert_eq!(g.status, GeodesicStatus::ReachedT);
    // unit speed: direction (0.3, -0.4, 1.2) has length 1.3
    let expect: Vec<f64> = [1.0, 0.0, -1.0].iter().zip([0.3, -0.4, 1.2]).map(|(a, b)| a + 5.0 * b / 1.3).collect();
    assert!(max_diff(&g.final_u, &expect) < 1e-12);
    assert_relative_eq!(g.final_s, 5.0);
    assert!(g.energy_drift < 1e-14);
}

#[test]
fn bounded_box_gives_boundary_exit_at_the_right_arclength() {
    let chart = flat_chart(DomainBox::new(vec![Interval::new(-1.0, 1.0); 2]));
    let g = geodesic_integrate(&chart, &[0.0, 0.0], &[1.0, 0.0], 10.0, &GeodesicOptions::default()).unwrap();
    assert_eq!(g.status, GeodesicStatus::BoundaryExit);
    let exit = g.exit.unwrap();
    assert!((exit.s - 1.0).abs() < 1e-6, "{}", exit.s);
}

#[test]
fn equator_is_a_closed_geodesic_of_the_sphere() {
    let s = round_sphere(1.0);
    let opts = GeodesicOptions::for_box(s.domain());
    let g = geodesic_integrate(&s, &[PI / 2.0, 0.3], &[0.0, 1.0], TAU, &opts).unwrap();
    assert_eq!(g.status, GeodesicStatus::ReachedT);
    assert!((g.final_u[0] - PI / 2.0).abs() < 1e-8);
    assert!(s.domain().axes[1].difference(g.final_u[1], 0.3).abs() < 1e-8);
    assert!(g.energy_drift < 1e-8);
    // a tilted great circle also closes, through the periodic seam
    let g = geodesic_integrate(&s, &[1.0, 0.5], &[0.3, 0.7 / 1f64.sin()], TAU, &opts).unwrap();
    assert!((g.final_u[0] - 1.0).abs() < 1e-7);
    assert!(s.domain().axes[1].difference(g.final_u[1], 0.5).abs() < 1e-7);
}

#[test]
fn closed_search_finds_great_circles_only_where_they_exist() {
    let s = round_sphere(1.0);
    let r = closed_geodesic_search(&s, s.domain(), &ClosedSearchSpec::default());
    assert!(!r.found.is_empty());
    for c in &r.found {
        assert!(c.mismatch < 1e-6);
        assert_relative_eq!(c.period, TAU, max_relative = 1e-6);
    }
    let flat = flat_chart(DomainBox::new(vec![Interval::new(-5.0, 5.0); 2]));
    let r = closed_geodesic_search(&flat, &DomainBox::new(vec![Interval::new(-1.0, 1.0); 2]), &ClosedSearchSpec::default());
    assert!(r.found.is_empty());
}

#[test]
fn rigged_curvature_matches_finite_differences() {
    for (imm, rig) in [grw_graph(WarpSpec::T2plus1, 2, Profile::Planar, "f_dt"), lightcone(4, "dt_rot")] {
        let chart = rigged_metric_chart(&imm, &rig).unwrap();
        let u = &imm.samples(SampleSpec::new(1, 3))[0];
        let c = rigged_curvature_at(&chart, u).unwrap();
        let fd = fd_riemann(&chart, u, 1e-3);
        assert!(max_diff(&c.riemann, &fd) < 1e-7, "{}", max_diff(&c.riemann, &fd));
        let gam = fd_christoffel(&chart, u, 1e-3);
        let n = chart.dim();
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    assert!((c.christoffel.get(a, b, cc) - gam[(a * n + b) * n + cc]).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn lightcone_rigged_metric_is_flat_and_raychaudhuri_closed_form() {
    let (imm, rig) = lightcone(3, "dt");
    let chart = rigged_metric_chart(&imm, &rig).unwrap();
    for u in imm.samples(SampleSpec::new(30, 5)) {
        assert!(rigged_curvature_at(&chart, &u).unwrap().max_abs() < 1e-12);
        let r = raychaudhuri_residual_at(&imm, &rig, &u).unwrap();
        let inv2 = 1.0 / (u[0] * u[0]);
        assert_relative_eq!(r.xi_h, inv2, max_relative = 1e-8);
        assert_relative_eq!(r.astar_norm_sq, inv2, max_relative = 1e-12);
        assert!(r.ric_xi.abs() < 1e-14 && r.tau_xi.abs() < 1e-14);
        assert!(r.residual < 1e-8);
    }
}

#[test]
fn divergence_matches_finite_differences() {
    for (imm, rig) in [lightcone(4, "dt"), grw_graph(WarpSpec::Exp, 3, Profile::Axial, "dt"), grw_graph(WarpSpec::Cosh, 2, Profile::Planar, "dt_rot")] {
        for u in imm.samples(SampleSpec::new(3, 8)) {
            let d = divergence_check_at(&imm, &rig, &u).unwrap();
            // (1/sqrt det) d_k (sqrt det xi^k)
            let dens = |q: &[f64]| {
                let rs = rigged_structure_at(&imm, &rig, q).unwrap();
                let s = rs.gtilde.determinant().sqrt();
                rs.xi_param.iter().map(|x| s * x).collect::<Vec<f64>>()
            };
            let s0 = rigged_structure_at(&imm, &rig, &u).unwrap().gtilde.determinant().sqrt();
            let div: f64 = (0..u.len()).map(|k| central(dens, &u, k, 1e-3)[k]).sum::<f64>() / s0;
            assert!((d.divergence - div).abs() < 1e-8, "{} vs {div}", d.divergence);
            assert!((d.mean_curvature + div).abs() < 1e-8);
        }
    }
}

#[test]
fn mixed_ricci_and_difference_formula() {
    let (imm, rig) = setup(SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp }, HypersurfaceSpec::Lightcone { vertex: None }, "f_dt");
    for u in imm.samples(SampleSpec::new(20, 1)) {
        let m = mixed_ricci_at(&imm, &rig, &u).unwrap();
        assert!(m.max_abs < 1e-9);
        assert!(m.difference_residual.unwrap() < 1e-9);
    }
    // difference formula is only stated for closed riggings
    let (imm, rig) = lightcone(4, "dt_rot");
    assert!(mixed_ricci_at(&imm, &rig, &[1.0, 1.0, 1.0]).unwrap().difference_residual.is_none());
}

#[test]
fn screen_sectional_relation_on_the_lightcone() {
    let (imm, rig) = lightcone(4, "dt");
    for u in imm.samples(SampleSpec::new(20, 2)) {
        let s = screen_sectional_default_at(&imm, &rig, &u).unwrap();
        assert_eq!(s.route, LeafRoute::Leaf);
        // leaves are round spheres of radius r
        assert_relative_eq!(s.k_tilde_screen, 1.0 / (u[0] * u[0]), max_relative = 1e-8);
        assert!((s.k_tilde_screen - s.gauss_cross_check).abs() < 1e-8);
        assert!(s.k_bar.abs() < 1e-14);
        assert!(s.residual < 1e-8);
    }
    let (imm, rig) = lightcone(3, "dt");
    assert!(screen_sectional_default_at(&imm, &rig, &[1.0, 1.0]).is_err());
}

#[test]
fn hessian_identity_matches_finite_differences() {
    for (imm, rig) in [lightcone(3, "dt"), grw_graph(WarpSpec::T2plus1, 2, Profile::Planar, "f_dt")] {
        let chart = rigged_metric_chart(&imm, &rig).unwrap();
        let pot = rig.potential.clone().unwrap();
        let f = |q: &[f64]| {
            let x = imm.point(q).unwrap();
            vec![pot(&nullrig::Jet::variables(&x, 0)).value()]
        };
        for u in imm.samples(SampleSpec::new(4, 6)) {
            let n = u.len();
            let grad = |q: &[f64]| (0..n).map(|k| central(f, q, k, 1e-3)[0]).collect::<Vec<f64>>();
            let g0 = grad(&u);
            let gam = fd_christoffel(&chart, &u, 1e-3);
            let s = shape_at(&imm, &rig, &u).unwrap();
            for i in 0..n {
                let di = central(grad, &u, i, 1e-3);
                for j in 0..n {
                    let hess = di[j] - (0..n).map(|k| gam[(k * n + i) * n + j] * g0[k]).sum::<f64>();
                    assert!((hess + s.b[(i, j)]).abs() < 1e-5, "{} + {}", hess, s.b[(i, j)]);
                }
            }
        }
        let h = hessian_convexity_check(&imm, &rig, &imm.samples(SampleSpec::new(20, 1))).unwrap();
        assert!(h.residual < 1e-9);
    }
    let (imm, rig) = lightcone(3, "dt");
    let h = hessian_convexity_check(&imm, &rig, &imm.samples(SampleSpec::new(20, 1))).unwrap();
    assert_eq!(h.b_screen, Definiteness::PositiveSemidefinite);
    assert!(!h.convex && h.convex_after_flip);
    let (imm, rig) = lightcone(3, "dt_rot");
    assert!(matches!(hessian_convexity_check(&imm, &rig, &[vec![1.0, 1.0]]), Err(nullrig::Error::NotGradient(_))));
}

#[test]
fn gradient_identity_for_catalog_potentials() {
    for (imm, rig) in [
        lightcone(3, "dt"),
        grw_graph(WarpSpec::T2plus1, 2, Profile::Planar, "grad(h)"),
        grw_graph(WarpSpec::Exp, 3, Profile::Axial, "f_dt"),
    ] {
        for u in imm.samples(SampleSpec::new(20, 4)) {
            let g = gradient_identity_at(&imm, &rig, &u).unwrap();
            assert!(g.residual < 1e-9 && g.unit_residual < 1e-12);
        }
    }
}

#[test]
fn completeness_probe_and_bound_check() {
    let (imm, rig) = setup(SpacetimeSpec::Minkowski { dim: 3 }, HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, "dt");
    let chart = rigged_metric_chart(&imm, &rig).unwrap();
    let p = completeness_probe(&chart, chart.sample_box(), &ProbeSpec::default());
    assert_eq!((p.total, p.reached), (64, 64));
    assert_eq!(p.verdict, ProbeVerdict::NoIncompletenessDetectedUpToT);
    let b = mean_curvature_bound_check(&imm, &rig, &imm.samples(SampleSpec::new(20, 1)), 0.0, &p, BoundTolerances::default());
    assert_eq!(b.verdict, BoundVerdict::Verified);

    let (imm, rig) = lightcone(3, "dt");
    let chart = rigged_metric_chart(&imm, &rig).unwrap();
    let p = completeness_probe(&chart, chart.sample_box(), &ProbeSpec::default());
    assert_eq!(p.verdict, ProbeVerdict::IncompletenessWitnessFound);
    assert!(p.escapes.iter().any(|e| e.status == GeodesicStatus::BoundaryExit && e.s.is_finite() && e.u[0] < 1e-3));
    let b = mean_curvature_bound_check(&imm, &rig, &imm.samples(SampleSpec::new(20, 1)), 0.0, &p, BoundTolerances::default());
    assert_eq!(b.verdict, BoundVerdict::NotApplicable);
}

#[test]
fn probe_is_deterministic() {
    let s = round_sphere(1.0);
    let spec = ProbeSpec { points: 3, directions: 3, t_max: 4.0, seed: 9 };
    assert_eq!(probe_initial_conditions(2, s.domain(), &spec), probe_initial_conditions(2, s.domain(), &spec));
    let a = completeness_probe(&s, s.domain(), &spec);
    let b = completeness_probe(&s, s.domain(), &spec);
    assert_eq!(a.reached, b.reached);
    assert_eq!(a.max_energy_drift, b.max_energy_drift);
}

#[test]
fn umbilic_bound_arithmetic_cases() {
    // B = rho g on an n-dimensional screen: H = n rho, |A*|^2 = n rho^2
    assert!(umbilic_bound_arithmetic(2.0, 2.0, 2, 1e-12));
    assert!(umbilic_bound_arithmetic(1.0, 0.5, 2, 1e-12));
    // |H| <= |A*|^2 reported with |rho| < 1 is inconsistent
    assert!(!umbilic_bound_arithmetic(1.0, 2.0, 2, 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn raychaudhuri_and_divergence_hold(
        case in 0usize..3,
        rig_name in prop::sample::select(vec!["dt", "f_dt", "dt_rot"]),
        seed in 0u64..10_000,
    ) {
        let (imm, rig) = match case {
            0 => lightcone(4, rig_name),
            1 => grw_graph(WarpSpec::T2plus1, 2, Profile::Planar, rig_name),
            _ => grw_graph(WarpSpec::Exp, 3, Profile::Axial, rig_name),
        };
        let u = &imm.samples(SampleSpec::new(1, seed))[0];
        prop_assert!(raychaudhuri_residual_at(&imm, &rig, u).unwrap().residual < 1e-7);
        prop_assert!(divergence_check_at(&imm, &rig, u).unwrap().residual < 1e-10);
    }

    #[test]
    fn geodesic_energy_is_conserved_on_the_sphere(th in 0.5f64..2.6, ph in 0.0f64..6.2, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        prop_assume!(a.abs() + b.abs() > 0.1);
        let s = round_sphere(1.0);
        let g = geodesic_integrate(&s, &[th, ph], &[a, b], 3.0, &GeodesicOptions::for_box(s.domain())).unwrap();
        prop_assert!(g.energy_drift < 1e-7);
    }
}

#[test]
fn radial_geodesic_on_the_lightcone_reaches_the_apex() {
    let (imm, rig) = lightcone(3, "dt");
    let chart = rigged_metric_chart(&imm, &rig).unwrap();
    let g = geodesic_integrate(&chart, &[1.0, 0.0], &[-1.0, 0.0], 10.0, &GeodesicOptions::default()).unwrap();
    assert_eq!(g.status, GeodesicStatus::BoundaryExit);
    let exit = g.exit.unwrap();
    assert!((exit.s - 1.0).abs() < 1e-3, "{}", exit.s);
}
