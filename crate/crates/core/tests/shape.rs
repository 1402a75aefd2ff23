mod common;

use approx::assert_relative_eq;
use common::*;
use nullrig::geometry::{inner, metric_at};
use nullrig::hypersurface::Immersion;
use nullrig::models::*;
use nullrig::rigging::{rigged_structure_at, RiggingField};
use nullrig::sampling::SampleSpec;
use nullrig::shape::*;
use proptest::prelude::*;

fn setup(st: SpacetimeSpec, hs: HypersurfaceSpec, rig: &str) -> (Spacetime, Immersion, RiggingField) {
    let st = make_spacetime(&st).unwrap();
    let imm = make_hypersurface(&hs, &st).unwrap();
    let r = make_rigging(rig, &st).unwrap();
    (st, imm, r)
}

fn grw_graph(warp: WarpSpec, dim: usize, profile: Profile) -> (SpacetimeSpec, HypersurfaceSpec) {
    (
        SpacetimeSpec::Grw { warp, fiber: FiberSpec::Flat { dim } },
        HypersurfaceSpec::GrwNullGraph { profile, s0: 0.0, direction: None, extent: None },
    )
}

/// `ḡ(∇̄_X V, ξ)` with `V` a field along the immersion given by `v(u)`.
fn fd_covariant<F: Fn(&[f64]) -> Vec<f64>>(imm: &Immersion, u: &[f64], i: usize, v: F, target: &[f64]) -> f64 {
    let h = 1e-3;
    let x = imm.point(u).unwrap();
    let dx = central(|q| imm.point(q).unwrap(), u, i, h);
    let dv = central(&v, u, i, h);
    let gam = fd_christoffel(imm.chart.as_ref(), &x, h);
    let n = x.len();
    let v0 = v(u);
    let cov: Vec<f64> = (0..n)
        .map(|a| dv[a] + (0..n).map(|b| (0..n).map(|c| gam[(a * n + b) * n + c] * dx[b] * v0[c]).sum::<f64>()).sum::<f64>())
        .collect();
    let g = metric_at(imm.chart.as_ref(), &x).unwrap();
    inner(&g, &cov, target)
}

#[test]
fn second_fundamental_form_and_rotation_form_match_finite_differences() {
    let cases = [
        grw_graph(WarpSpec::T2plus1, 2, Profile::Planar),
        grw_graph(WarpSpec::Exp, 3, Profile::Axial),
        grw_graph(WarpSpec::Cosh, 3, Profile::Radial),
    ];
    for (sts, hs) in cases {
        for rig_name in ["dt", "dt_rot"] {
            let (_, imm, rig) = setup(sts.clone(), hs.clone(), rig_name);
            for u in imm.samples(SampleSpec::new(4, 21)) {
                let s = shape_at(&imm, &rig, &u).unwrap();
                let xi = &s.rigged.xi;
                let m = imm.param_dim();
                for i in 0..m {
                    for j in 0..m {
                        let ej = |q: &[f64]| central(|p| imm.point(p).unwrap(), q, j, 1e-4);
                        let b = fd_covariant(&imm, &u, i, ej, xi);
                        assert!((s.b[(i, j)] - b).abs() < 1e-6, "B[{i}{j}] {} vs {b}", s.b[(i, j)]);
                    }
                    let nfield = |q: &[f64]| rigged_structure_at(&imm, &rig, q).unwrap().transversal;
                    let tau = fd_covariant(&imm, &u, i, nfield, xi);
                    assert!((s.tau[i] - tau).abs() < 1e-7, "tau[{i}] {} vs {tau}", s.tau[i]);
                }
            }
        }
    }
}

#[test]
fn lightcone_closed_forms() {
    let (_, imm, rig) = setup(SpacetimeSpec::Minkowski { dim: 3 }, HypersurfaceSpec::Lightcone { vertex: None }, "dt");
    let pts = imm.samples(SampleSpec::new(100, 1));
    for u in &pts {
        let s = shape_at(&imm, &rig, u).unwrap();
        let r = u[0];
        assert_relative_eq!(s.mean_curvature, 1.0 / r, max_relative = 1e-12);
        assert!(s.tau.iter().all(|t| t.abs() < 1e-14));
        // B = (1/r) g on the angular direction, and A_N = A*/2
        assert_relative_eq!(s.b[(1, 1)], r, max_relative = 1e-12);
        assert_relative_eq!(s.b[(1, 1)] / s.rigged.induced[(1, 1)], 1.0 / r, max_relative = 1e-12);
        for k in 0..2 {
            assert!((s.an[(k, 1)] - 0.5 * s.astar[(k, 1)]).abs() < 1e-14);
        }
    }
    let c = classify_hypersurface(&imm, &rig, &pts, ClassifyTolerances::default());
    assert_eq!(c.kind, Kind::TotallyUmbilic);
    for (u, rho) in pts.iter().zip(&c.umbilic_rho) {
        assert_relative_eq!(*rho, 1.0 / u[0], max_relative = 1e-12);
    }
    assert!(c.phi.iter().all(|p| (p - 0.5).abs() < 1e-12));
}

#[test]
fn higher_dimensional_lightcone_mean_curvature() {
    for dim in [4, 5] {
        let (_, imm, rig) = setup(SpacetimeSpec::Minkowski { dim }, HypersurfaceSpec::Lightcone { vertex: None }, "dt");
        for u in imm.samples(SampleSpec::new(10, 2)) {
            let s = shape_at(&imm, &rig, &u).unwrap();
            assert_relative_eq!(s.mean_curvature, (dim - 2) as f64 / u[0], max_relative = 1e-12);
        }
    }
}

#[test]
fn classification_of_catalog_cases() {
    let cases: Vec<(SpacetimeSpec, HypersurfaceSpec, &str, Kind)> = vec![
        (SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, "dt", Kind::TotallyGeodesic),
        (SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::One }, HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, "sqrt2_dt", Kind::TotallyGeodesic),
        (SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::Lightcone { vertex: None }, "dt", Kind::TotallyUmbilic),
        (SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp }, HypersurfaceSpec::Lightcone { vertex: None }, "f_dt", Kind::TotallyUmbilic),
        {
            let (a, b) = grw_graph(WarpSpec::Exp, 3, Profile::Axial);
            (a, b, "dt", Kind::Generic)
        },
    ];
    for (st, hs, rig, kind) in cases {
        let (_, imm, r) = setup(st, hs, rig);
        let c = classify_hypersurface(&imm, &r, &imm.samples(SampleSpec::new(40, 1)), ClassifyTolerances::default());
        assert_eq!(c.kind, kind, "{} / {rig}", imm.name);
        assert!(c.failures.is_empty());
    }
}

#[test]
fn conditional_identities_are_skipped_without_their_hypotheses() {
    let (_, imm, rig) = setup(SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::Lightcone { vertex: None }, "dt_rot");
    let checks = identity_suite_at(&imm, &rig, &[1.0, 1.0, 1.0]).unwrap();
    let skipped: Vec<&str> = checks.iter().filter(|c| c.skipped.is_some()).map(|c| c.name.as_str()).collect();
    assert!(skipped.contains(&"tau_from_an_xi") && skipped.contains(&"screen_leaf_form"), "{skipped:?}");
    for c in checks.iter().filter(|c| c.residual.is_some()) {
        assert!(c.residual.unwrap() < 1e-9, "{}: {:?}", c.name, c.residual);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn identity_suite_holds_on_random_samples(
        case in 0usize..5,
        rig_name in prop::sample::select(vec!["dt", "f_dt", "sqrt2_dt", "dt_rot"]),
        seed in 0u64..10_000,
    ) {
        let (st, hs) = match case {
            0 => (SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::Lightcone { vertex: None }),
            1 => (SpacetimeSpec::Minkowski { dim: 3 }, HypersurfaceSpec::NullPlane { direction: Some(vec![0.6, 0.8]), s0: 1.0 }),
            2 => grw_graph(WarpSpec::T2plus1, 2, Profile::Planar),
            3 => grw_graph(WarpSpec::Exp, 3, Profile::Axial),
            _ => grw_graph(WarpSpec::Cosh, 3, Profile::Radial),
        };
        let (_, imm, rig) = setup(st, hs, rig_name);
        let u = &imm.samples(SampleSpec::new(1, seed))[0];
        for c in identity_suite_at(&imm, &rig, u).unwrap() {
            if let Some(r) = c.residual {
                prop_assert!(r < 1e-8, "{} = {}", c.name, r);
            }
        }
        let s = shape_at(&imm, &rig, u).unwrap();
        prop_assert!((&s.b - s.b.transpose()).amax() < 1e-10);
        prop_assert!(s.tangency_defect < 1e-10);
    }
}
