//! Curvature of the rigged metric compared with the ambient and null geometry.

use nullrig::models::*;
use nullrig::rigged::*;
use nullrig::sampling::SampleSpec;

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp })?;
    let imm = make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &st)?;
    let rig = make_rigging("f_dt", &st)?;
    for u in imm.samples(SampleSpec::new(3, 1)) {
        println!("u = {u:.3?}");
        let m = mixed_ricci_at(&imm, &rig, &u)?;
        println!("  mixed Ricci max |Ric(X, xi)| = {:.1e}", m.max_abs);
        if let Some(d) = m.difference_residual {
            println!("  curvature difference formula residual = {d:.1e}");
        }
        let s = screen_sectional_default_at(&imm, &rig, &u)?;
        println!(
            "  screen sectional: ambient {:.6}, screen {:.6}, route {:?}, residual {:.1e}",
            s.k_bar, s.k_tilde_screen, s.route, s.residual
        );
        let r = raychaudhuri_residual_at(&imm, &rig, &u)?;
        println!("  Raychaudhuri: xi(H) = {:.6}, residual {:.1e}", r.xi_h, r.residual);
        let d = divergence_check_at(&imm, &rig, &u)?;
        println!("  H = {:.6}, -div xi = {:.6}", d.mean_curvature, -d.divergence);
    }
    Ok(())
}
