//! Exact derivatives with jets, and curvature of the round sphere.

use nullrig::geometry::{christoffel, curvature_at};
use nullrig::models::round_sphere;
use nullrig::Jet;

fn main() -> nullrig::Result<()> {
    // f(x, y) = exp(x) sin(y) to second order at (0.5, 1.0)
    let v = Jet::variables(&[0.5, 1.0], 2);
    let f = &v[0].exp() * &v[1].sin();
    println!("f = {:.6}, grad = {:?}", f.value(), f.gradient());
    println!("hessian = {:?}", f.hessian());

    let sphere = round_sphere(2.0);
    let p = [1.1, 0.3];
    let gamma = christoffel(&sphere, &p)?;
    println!("Gamma^theta_phiphi = {:.12} (expected {:.12})", gamma.get(0, 1, 1), -p[0].sin() * p[0].cos());
    let curv = curvature_at(&sphere, &p)?;
    println!("sectional curvature = {:.12} (expected 0.25)", curv.sectional(&[1.0, 0.0], &[0.0, 1.0])?);
    Ok(())
}
