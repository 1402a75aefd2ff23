//! Solve the eikonal equation s' = f(s) for a null graph in a GRW space.

use nullrig::models::{eikonal_solve, EikonalProfile, Warp, WarpSpec};

fn main() -> nullrig::Result<()> {
    for spec in [WarpSpec::Exp, WarpSpec::T2plus1, WarpSpec::Cosh] {
        let warp = Warp::new(spec.clone())?;
        // strict solve fails when the solution leaves through infinity inside the interval
        if let Err(e) = eikonal_solve(&warp, 0.0, -2.0, 2.0) {
            println!("{spec:?}: strict solve on (-2, 2) failed: {e}");
        }
        let p = EikonalProfile::maximal(&warp, 0.0, -2.0, 2.0);
        println!("{spec:?}: profile on ({:.4}, {:.4})", p.lo, p.hi);
        for x in [-0.5, 0.0, 0.5] {
            if p.contains(x) {
                println!("  s({x:+}) = {:.10}, residual {:.1e}", p.value(x), p.residual(x));
            }
        }
    }
    Ok(())
}
