//! Rigged data on the lightcone: ξ, N, the screen and the rigged metric.

use nullrig::models::*;
use nullrig::rigging::{closedness_scan, conformality_scan, rigged_structure_at};
use nullrig::sampling::SampleSpec;

fn main() -> nullrig::Result<()> {
    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 3 })?;
    let imm = make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &st)?;
    for name in ["dt", "dt_rot"] {
        let rig = make_rigging(name, &st)?;
        let u = [1.5, 0.4];
        let rs = rigged_structure_at(&imm, &rig, &u)?;
        println!("rigging {name} at (r, theta) = {u:?}");
        println!("  xi = {:?}", rs.xi);
        println!("  N  = {:?}", rs.transversal);
        println!("  rigged metric = {}", rs.gtilde);
        for (check, r) in rs.invariant_residuals() {
            println!("  {check:<24} {r:.1e}");
        }
        let pts: Vec<Vec<f64>> = imm.samples(SampleSpec::new(20, 1)).iter().map(|u| imm.point(u)).collect::<Result<_, _>>()?;
        let closed = closedness_scan(&st.chart, &rig, &pts, 1e-9);
        let conf = conformality_scan(&st.chart, &rig, &pts, 1e-9);
        println!("  closed: {}  conformal: {}", closed.is_closed, conf.is_conformal);
    }
    Ok(())
}
