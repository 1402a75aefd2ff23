//! Catalog null hypersurfaces.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::eikonal::EikonalProfile;
use super::spacetime::{FiberSpec, Spacetime};
use crate::error::{Error, Result};
use crate::geometry::{ChartMetric, DomainBox, Interval, JetMap};
use crate::hypersurface::{ensure_null, Immersion};
use crate::jet::Jet;
use crate::sampling::SampleSpec;

/// Symmetry of an eikonal graph `t = s(d)`: `d` is a linear coordinate,
/// the distance to a point, or the distance to a codimension-2 axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Planar,
    Radial,
    Axial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum HypersurfaceSpec {
    /// `t = s0 + (direction · x)` in Minkowski, the planar null graph otherwise.
    NullPlane {
        #[serde(default)]
        direction: Option<Vec<f64>>,
        #[serde(default)]
        s0: f64,
    },
    /// Future null cone of `vertex` (`t` first); a radial null graph in warped products.
    Lightcone {
        #[serde(default)]
        vertex: Option<Vec<f64>>,
    },
    GrwNullGraph {
        profile: Profile,
        #[serde(default)]
        s0: f64,
        #[serde(default)]
        direction: Option<Vec<f64>>,
        /// Interval requested for the profile (planar) or its radius (radial, axial).
        #[serde(default)]
        extent: Option<[f64; 2]>,
    },
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::InvalidSpec("direction must be a nonzero vector".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

/// Orthonormal completion of the unit vector `d`.
fn complement(d: &[f64]) -> Vec<Vec<f64>> {
    let k = d.len();
    let mut basis = vec![d.to_vec()];
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        for b in &basis {
            let p: f64 = b.iter().zip(&v).map(|(a, c)| a * c).sum();
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj -= p * bj;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
        if basis.len() == k {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Unit vector of `S^{k−1}` in hyperspherical angles `(θ₁, …, θ_{k−2}, φ)`.
fn sphere_point(angles: &[Jet]) -> Vec<Jet> {
    let k = angles.len() + 1;
    let mut out = Vec::with_capacity(k);
    let mut prod = Jet::constant(1.0);
    if k == 2 {
        return vec![angles[0].cos(), angles[0].sin()];
    }
    // x_k = cos θ₁, x_{k-1} = sin θ₁ cos θ₂, …, (x_1, x_2) = Π sin · (cos φ, sin φ)
    let mut tail = Vec::with_capacity(k);
    for a in &angles[..k - 2] {
        tail.push(&prod * &a.cos());
        prod = &prod * &a.sin();
    }
    let phi = &angles[k - 2];
    out.push(&prod * &phi.cos());
    out.push(&prod * &phi.sin());
    out.extend(tail.into_iter().rev());
    out
}

fn angle_domain(k: usize) -> (Vec<Interval>, Vec<Interval>) {
    // (domain, sampling) for the k−1 angles of S^{k−1}
    let mut dom = vec![Interval::new(0.0, PI); k.saturating_sub(2)];
    let mut smp = vec![Interval::new(0.3, PI - 0.3); k.saturating_sub(2)];
    dom.push(Interval::periodic(0.0, TAU));
    smp.push(Interval::new(0.0, TAU));
    (dom, smp)
}

fn angle_names(k: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..k.saturating_sub(1)).map(|i| format!("theta{i}")).collect();
    v.push(if k == 2 { "theta".into() } else { "phi".into() });
    v
}

fn flat_fiber(st: &Spacetime, what: &str) -> Result<usize> {
    match st.fiber {
        FiberSpec::Flat { dim } => Ok(dim),
        _ => Err(Error::InvalidSpec(format!("{what} needs a flat fiber"))),
    }
}

fn sample_interval(lo: f64, hi: f64, default: (f64, f64)) -> Interval {
    let (a, b) = default;
    let w = (hi - lo).min(4.0);
    let a = if lo.is_finite() { a.max(lo + 0.125 * w) } else { a };
    let b = if hi.is_finite() { b.min(hi - 0.125 * w) } else { b };
    Interval::new(a, b)
}

/// Build an immersion from a catalog spec and check that it is null.
pub fn make_hypersurface(spec: &HypersurfaceSpec, st: &Spacetime) -> Result<Immersion> {
    let imm = build(spec, st)?;
    ensure_null(&imm, SampleSpec::new(16, 0x5eed), 1e-9)?;
    Ok(imm)
}

fn build(spec: &HypersurfaceSpec, st: &Spacetime) -> Result<Immersion> {
    let chart = st.chart.clone();
    let k = flat_fiber(st, "catalog hypersurface")?;
    let n = chart.dim();
    let t_interval = chart.domain().axes[0];
    match spec {
        HypersurfaceSpec::NullPlane { direction, s0 } => {
            if st.warp.is_none() {
                let d = unit(direction.as_deref().unwrap_or(&e1(k)))?;
                if d.len() != k {
                    return Err(Error::InvalidSpec("direction has wrong length".into()));
                }
                let comp = complement(&d);
                let s0 = *s0;
                let map: JetMap = Arc::new(move |u: &[Jet]| {
                    let mut x = vec![&u[0] + s0];
                    for a in 0..d.len() {
                        let mut c = &u[0] * d[a];
                        for (j, b) in comp.iter().enumerate() {
                            c += &(&u[j + 1] * b[a]);
                        }
                        x.push(c);
                    }
                    x
                });
                let m = n - 1;
                return Ok(Immersion::new(
                    "null_plane",
                    chart,
                    (1..=m).map(|i| format!("u{i}")).collect(),
                    DomainBox::unbounded(m),
                    DomainBox::new(vec![Interval::new(-2.0, 2.0); m]),
                    map,
                ));
            }
            build(
                &HypersurfaceSpec::GrwNullGraph {
                    profile: Profile::Planar,
                    s0: *s0,
                    direction: direction.clone(),
                    extent: None,
                },
                st,
            )
            .map(|mut i| {
                i.name = "null_plane".into();
                i
            })
        }
        HypersurfaceSpec::Lightcone { vertex } => {
            let v = vertex.clone().unwrap_or_else(|| vec![0.0; n]);
            if v.len() != n {
                return Err(Error::InvalidSpec("vertex has wrong length".into()));
            }
            if k < 2 {
                return Err(Error::InvalidSpec("lightcone needs ambient dimension >= 3".into()));
            }
            if st.warp.is_none() {
                let map: JetMap = Arc::new(move |u: &[Jet]| {
                    let dirs = sphere_point(&u[1..]);
                    let mut x = vec![&u[0] + v[0]];
                    for (a, d) in dirs.iter().enumerate() {
                        x.push(&(&u[0] * d) + v[a + 1]);
                    }
                    x
                });
                let (mut dom, mut smp) = (vec![Interval::new(0.0, f64::INFINITY)], vec![Interval::new(0.5, 3.0)]);
                let (ad, asm) = angle_domain(k);
                dom.extend(ad);
                smp.extend(asm);
                let mut names = vec!["r".to_string()];
                names.extend(angle_names(k));
                return Ok(Immersion::new("lightcone", chart, names, DomainBox::new(dom), DomainBox::new(smp), map));
            }
            let warp = st.warp_or_one();
            let profile = EikonalProfile::maximal(&warp, v[0], 0.0, 10.0);
            radial(st, Arc::new(profile), v, "lightcone")
        }
        HypersurfaceSpec::GrwNullGraph {
            profile,
            s0,
            direction,
            extent,
        } => {
            if !t_interval.contains(*s0) {
                return Err(Error::InvalidSpec(format!("s0 = {s0} outside the time interval")));
            }
            let warp = st.warp_or_one();
            match profile {
                Profile::Planar => {
                    let [a, b] = extent.unwrap_or([-10.0, 10.0]);
                    let p = Arc::new(EikonalProfile::maximal(&warp, *s0, a, b));
                    let d = unit(direction.as_deref().unwrap_or(&e1(k)))?;
                    if d.len() != k {
                        return Err(Error::InvalidSpec("direction has wrong length".into()));
                    }
                    let comp = complement(&d);
                    let (lo, hi) = (p.lo, p.hi);
                    let pm = p.clone();
                    let map: JetMap = Arc::new(move |u: &[Jet]| {
                        let mut x = vec![pm.eval(&u[0])];
                        for a in 0..d.len() {
                            let mut c = &u[0] * d[a];
                            for (j, b) in comp.iter().enumerate() {
                                c += &(&u[j + 1] * b[a]);
                            }
                            x.push(c);
                        }
                        x
                    });
                    let mut dom = vec![Interval::new(lo, hi)];
                    dom.extend(vec![Interval::unbounded(); k - 1]);
                    let mut smp = vec![sample_interval(lo, hi, (-2.0, 2.0))];
                    smp.extend(vec![Interval::new(-2.0, 2.0); k - 1]);
                    Ok(Immersion::new(
                        "grw_null_graph_planar",
                        chart,
                        (1..=k).map(|i| format!("u{i}")).collect(),
                        DomainBox::new(dom),
                        DomainBox::new(smp),
                        map,
                    ))
                }
                Profile::Radial => {
                    let [_, b] = extent.unwrap_or([0.0, 10.0]);
                    let p = EikonalProfile::maximal(&warp, *s0, 0.0, b);
                    let mut v = vec![0.0; n];
                    v[0] = *s0;
                    radial(st, Arc::new(p), v, "grw_null_graph_radial")
                }
                Profile::Axial => {
                    if k < 2 {
                        return Err(Error::InvalidSpec("axial graph needs fiber dimension >= 2".into()));
                    }
                    let [_, b] = extent.unwrap_or([0.0, 10.0]);
                    let p = Arc::new(EikonalProfile::maximal(&warp, *s0, 0.0, b));
                    let hi = p.hi;
                    let map: JetMap = Arc::new(move |u: &[Jet]| {
                        let mut x = vec![p.eval(&u[0]), &u[0] * &u[1].cos(), &u[0] * &u[1].sin()];
                        x.extend(u[2..].iter().cloned());
                        x
                    });
                    let mut dom = vec![Interval::new(0.0, hi), Interval::periodic(0.0, TAU)];
                    dom.extend(vec![Interval::unbounded(); k - 2]);
                    let mut smp = vec![sample_interval(0.0, hi, (0.5, 3.0)), Interval::new(0.0, TAU)];
                    smp.extend(vec![Interval::new(-2.0, 2.0); k - 2]);
                    let mut names = vec!["rho".to_string(), "theta".to_string()];
                    names.extend((1..=k - 2).map(|i| format!("z{i}")));
                    Ok(Immersion::new(
                        "grw_null_graph_axial",
                        chart,
                        names,
                        DomainBox::new(dom),
                        DomainBox::new(smp),
                        map,
                    ))
                }
            }
        }
    }
}

fn e1(k: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[0] = 1.0;
    v
}

fn radial(st: &Spacetime, p: Arc<EikonalProfile>, vertex: Vec<f64>, name: &str) -> Result<Immersion> {
    let k = st.fiber.dim();
    let hi = p.hi;
    let map: JetMap = Arc::new(move |u: &[Jet]| {
        let dirs = sphere_point(&u[1..]);
        let mut x = vec![p.eval(&u[0])];
        for (a, d) in dirs.iter().enumerate() {
            x.push(&(&u[0] * d) + vertex[a + 1]);
        }
        x
    });
    let mut dom = vec![Interval::new(0.0, hi)];
    let mut smp = vec![sample_interval(0.0, hi, (0.5, 3.0))];
    let (ad, asm) = angle_domain(k);
    dom.extend(ad);
    smp.extend(asm);
    let mut names = vec!["r".to_string()];
    names.extend(angle_names(k));
    Ok(Immersion::new(name, st.chart.clone(), names, DomainBox::new(dom), DomainBox::new(smp), map))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_points_are_unit() {
        let a = Jet::variables(&[0.7, 2.1], 1);
        let p = sphere_point(&a);
        let s: f64 = p.iter().map(|c| c.value().powi(2)).sum();
        assert!((s - 1.0).abs() < 1e-14);
        let c = complement(&[0.6, 0.8, 0.0]);
        assert_eq!(c.len(), 2);
    }
}
