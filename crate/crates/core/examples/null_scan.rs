//! Build catalog null hypersurfaces and check that their induced metric is degenerate.

use nullrig::geometry::ChartMetric;
use nullrig::hypersurface::{frame_at, null_scan};
use nullrig::models::*;
use nullrig::sampling::SampleSpec;

fn main() -> nullrig::Result<()> {
    let cases = [
        (SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::Lightcone { vertex: None }),
        (
            SpacetimeSpec::Grw { warp: WarpSpec::T2plus1, fiber: FiberSpec::Flat { dim: 2 } },
            HypersurfaceSpec::GrwNullGraph { profile: Profile::Planar, s0: 0.0, direction: None, extent: None },
        ),
        (
            SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp },
            HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 },
        ),
    ];
    for (st, hs) in cases {
        let st = make_spacetime(&st)?;
        let imm = make_hypersurface(&hs, &st)?;
        let scan = null_scan(&imm, SampleSpec::new(100, 1), 1e-9);
        println!(
            "{:<12} in {:<12} null: {} (worst eigenvalue ratio {:.2e})",
            imm.name,
            st.chart.name(),
            scan.is_null,
            scan.max_residual
        );
        let u = &imm.samples(SampleSpec::new(1, 2))[0];
        let f = frame_at(&imm, u)?;
        println!("  radical at {:?}: {:?}", u, f.radical);
    }
    Ok(())
}
