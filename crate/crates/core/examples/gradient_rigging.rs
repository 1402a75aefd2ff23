//! Gradient riggings: the rigged vector field as a gradient and the Hessian identity.

use nullrig::models::*;
use nullrig::rigged::*;
use nullrig::sampling::SampleSpec;

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 3 })?;
    let rig = make_rigging("dt", &st)?;
    let imm = make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &st)?;
    let pts = imm.samples(SampleSpec::new(40, 1));
    let mut worst = (0.0f64, 0.0f64);
    for u in &pts {
        let g = gradient_identity_at(&imm, &rig, u)?;
        worst = (worst.0.max(g.residual), worst.1.max(g.unit_residual));
    }
    println!("gradient identity residual {:.1e}, unit norm residual {:.1e}", worst.0, worst.1);
    let h = hessian_convexity_check(&imm, &rig, &pts)?;
    println!("Hessian + B residual {:.1e}", h.residual);
    println!("B on the screen: {:?}, convex {} (after flip {})", h.b_screen, h.convex, h.convex_after_flip);
    Ok(())
}
