use std::sync::Arc;

use approx::assert_relative_eq;
use nullrig::geometry::{DomainBox, Interval, JetMap};
use nullrig::hypersurface::*;
use nullrig::models::*;
use nullrig::sampling::SampleSpec;
use nullrig::{Error, Jet};

fn minkowski(dim: usize) -> Spacetime {
    make_spacetime(&SpacetimeSpec::Minkowski { dim }).unwrap()
}

#[test]
fn catalog_hypersurfaces_are_null() {
    let cases = [
        (SpacetimeSpec::Minkowski { dim: 3 }, HypersurfaceSpec::NullPlane { direction: Some(vec![1.0, 1.0]), s0: 0.5 }),
        (SpacetimeSpec::Minkowski { dim: 5 }, HypersurfaceSpec::Lightcone { vertex: Some(vec![1.0, 0.0, 2.0, 0.0, -1.0]) }),
        (
            SpacetimeSpec::Grw { warp: WarpSpec::Cosh, fiber: FiberSpec::Flat { dim: 3 } },
            HypersurfaceSpec::GrwNullGraph { profile: Profile::Radial, s0: 0.0, direction: None, extent: None },
        ),
        (
            SpacetimeSpec::Grw { warp: WarpSpec::Exp, fiber: FiberSpec::Flat { dim: 3 } },
            HypersurfaceSpec::GrwNullGraph { profile: Profile::Axial, s0: 0.0, direction: None, extent: None },
        ),
        (SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp }, HypersurfaceSpec::Lightcone { vertex: None }),
    ];
    for (st, hs) in cases {
        let st = make_spacetime(&st).unwrap();
        let imm = make_hypersurface(&hs, &st).unwrap();
        let scan = null_scan(&imm, SampleSpec::new(60, 3), 1e-9);
        assert!(scan.is_null, "{} in {:?}: {:?}", imm.name, st.spec, scan);
        assert_eq!(scan.max_kernel_dim, 1);
    }
}

#[test]
fn radical_is_null_and_orthogonal_to_the_tangent_space() {
    let st = make_spacetime(&SpacetimeSpec::Grw { warp: WarpSpec::T2plus1, fiber: FiberSpec::Flat { dim: 2 } }).unwrap();
    let imm = make_hypersurface(
        &HypersurfaceSpec::GrwNullGraph { profile: Profile::Planar, s0: 0.2, direction: None, extent: None },
        &st,
    )
    .unwrap();
    for u in imm.samples(SampleSpec::new(20, 9)) {
        let f = frame_at(&imm, &u).unwrap();
        let g = nullrig::geometry::metric_at(st.chart.as_ref(), &f.point).unwrap();
        let r = f.radical.clone().unwrap();
        for e in &f.basis {
            assert!(nullrig::geometry::inner(&g, &r, e).abs() < 1e-12);
        }
        assert_eq!(radical_at(&imm, &u).unwrap(), r);
    }
}

fn spacelike_plane() -> Immersion {
    let st = minkowski(3);
    let map: JetMap = Arc::new(|u: &[Jet]| vec![Jet::constant_like(0.0, &u[0]), u[0].clone(), u[1].clone()]);
    let b = DomainBox::new(vec![Interval::new(-1.0, 1.0); 2]);
    Immersion::new("t=0", st.chart, vec!["x".into(), "y".into()], b.clone(), b, map)
}

#[test]
fn non_null_surfaces_are_rejected() {
    let imm = spacelike_plane();
    let scan = null_scan(&imm, SampleSpec::new(10, 1), 1e-9);
    assert!(!scan.is_null);
    assert_relative_eq!(scan.max_residual, 1.0);
    assert!(matches!(radical_at(&imm, &[0.1, 0.2]), Err(Error::NotNull { .. })));
    let msg = ensure_null(&imm, SampleSpec::new(10, 1), 1e-9).unwrap_err().to_string();
    assert!(msg.contains("sample 0"), "{msg}");
}

#[test]
fn degenerate_parametrizations_are_rejected() {
    let st = minkowski(3);
    let map: JetMap = Arc::new(|u: &[Jet]| vec![u[0].clone(), u[0].clone(), Jet::constant_like(0.0, &u[0])]);
    let b = DomainBox::new(vec![Interval::new(-1.0, 1.0); 2]);
    let imm = Immersion::new("line", st.chart, vec!["a".into(), "b".into()], b.clone(), b, map);
    assert!(matches!(frame_at(&imm, &[0.0, 0.0]), Err(Error::RankDeficient { rank: 1, .. })));
    assert!(matches!(imm.point(&[2.0, 0.0]), Err(Error::OutsideDomain { .. })));
}

#[test]
fn lightcone_needs_three_dimensions_and_flat_fibers() {
    assert!(make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &minkowski(2)).is_err());
    let rw = make_spacetime(&SpacetimeSpec::RobertsonWalker { c: 1.0, warp: WarpSpec::Cosh }).unwrap();
    assert!(make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &rw).is_err());
}
