//! Probe geodesic completeness of the rigged metric on the null plane and the lightcone.

use nullrig::models::*;
use nullrig::rigged::*;
use nullrig::sampling::SampleSpec;

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 3 })?;
    let rig = make_rigging("dt", &st)?;
    for hs in [HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, HypersurfaceSpec::Lightcone { vertex: None }] {
        let imm = make_hypersurface(&hs, &st)?;
        let chart = rigged_metric_chart(&imm, &rig)?;
        let p = completeness_probe(&chart, chart.sample_box(), &ProbeSpec::default());
        println!("{}: {} of {} geodesics reached T = {}, {:?}", imm.name, p.reached, p.total, p.t_max, p.verdict);
        if let Some(e) = p.escapes.first() {
            println!("  first witness: {e:?}");
        }
        let pts = imm.samples(SampleSpec::new(50, 1));
        let b = mean_curvature_bound_check(&imm, &rig, &pts, 0.0, &p, BoundTolerances::default());
        println!("  |H| <= 0 bound: {:?} {:?}", b.verdict, b.reasons);
    }
    Ok(())
}
