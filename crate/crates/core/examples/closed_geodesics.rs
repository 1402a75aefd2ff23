//! Shooting search for closed geodesics: great circles on the round sphere, none on the lightcone.

use nullrig::geometry::ChartMetric;
use nullrig::models::*;
use nullrig::rigged::*;

fn main() -> nullrig::Result<()> {
    let sphere = round_sphere(1.0);
    let r = closed_geodesic_search(&sphere, sphere.domain(), &ClosedSearchSpec::default());
    println!("sphere: {} closed geodesics in {} shots", r.found.len(), r.attempts);
    if let Some(c) = r.found.first() {
        println!("  period {:.8} (2 pi = {:.8}), mismatch {:.1e}", c.period, std::f64::consts::TAU, c.mismatch);
    }

    let st = make_spacetime(&SpacetimeSpec::Minkowski { dim: 3 })?;
    let imm = make_hypersurface(&HypersurfaceSpec::Lightcone { vertex: None }, &st)?;
    let chart = rigged_metric_chart(&imm, &make_rigging("dt", &st)?)?;
    let r = closed_geodesic_search(&chart, chart.sample_box(), &ClosedSearchSpec::default());
    println!("lightcone: {} closed geodesics, best mismatch {:.2e}", r.found.len(), r.best_mismatch);

    let t = 2.0 * std::f64::consts::PI;
    let g = geodesic_integrate(&sphere, &[1.0, 0.5], &[0.0, 1.0 / 1f64.sin()], t, &GeodesicOptions::for_box(sphere.domain()))?;
    println!("sphere shot: {:?} after {} steps, energy drift {:.1e}", g.status, g.steps, g.energy_drift);
    Ok(())
}
