//! Evaluate every structural identity on a GRW null graph.

use nullrig::models::*;
use nullrig::sampling::SampleSpec;
use nullrig::shape::identity_suite_at;

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::Grw { warp: WarpSpec::T2plus1, fiber: FiberSpec::Flat { dim: 2 } })?;
    let imm = make_hypersurface(
        &HypersurfaceSpec::GrwNullGraph { profile: Profile::Planar, s0: 0.0, direction: None, extent: None },
        &st,
    )?;
    let rig = make_rigging("f_dt", &st)?;
    let mut worst: Vec<(String, f64)> = Vec::new();
    for u in imm.samples(SampleSpec::new(50, 1)) {
        for c in identity_suite_at(&imm, &rig, &u)? {
            let r = c.residual.unwrap_or(0.0);
            match worst.iter_mut().find(|(n, _)| *n == c.name) {
                Some(w) => w.1 = w.1.max(r),
                None => worst.push((c.name, r)),
            }
        }
    }
    for (name, r) in worst {
        println!("{name:<32} {r:.2e}");
    }
    Ok(())
}
