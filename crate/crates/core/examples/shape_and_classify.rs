//! Second fundamental forms, shape operators and the classification of a null hypersurface.

use nullrig::models::*;
use nullrig::sampling::SampleSpec;
use nullrig::shape::{classify_hypersurface, shape_at, ClassifyTolerances};

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 4 })?;
    let rig = make_rigging("dt", &st)?;
    for hs in [HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, HypersurfaceSpec::Lightcone { vertex: None }] {
        let imm = make_hypersurface(&hs, &st)?;
        let u = &imm.samples(SampleSpec::new(1, 4))[0];
        let s = shape_at(&imm, &rig, u)?;
        println!("{} at {:?}", imm.name, u);
        println!("  B on the screen = {}", s.b_screen());
        println!("  tau = {:?}, H = {:.6}", s.tau, s.mean_curvature);
        let c = classify_hypersurface(&imm, &rig, &imm.samples(SampleSpec::new(50, 1)), ClassifyTolerances::default());
        println!("  kind: {:?}", c.kind);
        for cand in &c.candidates {
            println!("    {:?}: holds {} (residual {:.1e})", cand.kind, cand.holds, cand.max_residual);
        }
    }
    Ok(())
}
