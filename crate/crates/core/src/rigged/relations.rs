//! Curvature relations between the ambient spacetime, the null hypersurface
//! and its rigged metric, plus the gradient, Hessian and bound checks.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{curvature_at, inner, jets_to_matrix, Christoffel, CurvatureData, MetricDerivs, Signature};
use crate::hypersurface::{push_forward, Immersion};
use crate::jet::{self, layout, Jet};
use crate::rigging::{d_alpha_at, local_rigging, LocalRigging, RiggingField};
use crate::shape::{shape_at, shape_from_local, ShapeData};

use super::chart::RiggedMetricChart;
use super::geodesic::{ProbeReport, ProbeVerdict};

fn rigged_curvature(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<(LocalRigging, CurvatureData)> {
    let loc = local_rigging(imm, rig, u, 2)?;
    let d = MetricDerivs::from_jets(&loc.gtilde, imm.param_dim(), Signature::Riemannian, u, 2)?;
    Ok((loc, CurvatureData::from_derivs(&d)))
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

/// Christoffel symbols of the induced connection `∇` (Gauss formula) and their first derivatives.
fn induced_connection(imm: &Immersion, loc: &LocalRigging) -> Result<(Christoffel, Vec<Vec<f64>>)> {
    let m = loc.param_dim();
    let n = loc.ambient_dim();
    let x0: Vec<f64> = loc.x.iter().map(Jet::value).collect();
    let d = MetricDerivs::at(imm.chart.as_ref(), &x0, 2)?;
    let gamma = d.christoffel();
    let dgamma = d.christoffel_derivatives();
    // Γ̄(x(u)) to first order in u
    let e0: Vec<Vec<f64>> = loc.e.iter().map(|ei| ei.iter().map(Jet::value).collect()).collect();
    let gbar_u: Vec<Jet> = (0..n * n * n)
        .map(|k| {
            let grad: Vec<f64> = (0..m)
                .map(|i| (0..n).map(|e| dgamma[e][k] * e0[i][e]).sum())
                .collect();
            Jet::linear(gamma.data[k], &grad)
        })
        .collect();
    let e1: Vec<Vec<Jet>> = loc.e.iter().map(|ei| ei.iter().map(|c| c.truncate(1)).collect()).collect();
    let nv: Vec<Jet> = loc.transversal.iter().map(|c| c.truncate(1)).collect();
    let mut frame = Vec::with_capacity(n * n);
    for a in 0..n {
        for k in 0..n {
            frame.push(if k < m { e1[k][a].clone() } else { nv[a].clone() });
        }
    }
    let mut conn = Christoffel::zeros(m);
    let mut dconn = vec![vec![0.0; m * m * m]; m];
    for i in 0..m {
        for j in 0..m {
            let w: Vec<Jet> = (0..n)
                .map(|a| {
                    let mut s = loc.e[j][a].derivative(i).truncate(1);
                    for b in 0..n {
                        for c in 0..n {
                            s += &(&(&gbar_u[(a * n + b) * n + c] * &e1[i][b]) * &e1[j][c]);
                        }
                    }
                    s
                })
                .collect();
            let sol = jet::solve(&frame, &w).ok_or(Error::DegenerateSpan)?;
            for k in 0..m {
                conn.set(k, i, j, sol[k].value());
                for (e, dc) in dconn.iter_mut().enumerate() {
                    dc[(k * m + i) * m + j] = sol[k].partial(&[e]);
                }
            }
        }
    }
    Ok((conn, dconn))
}

#[derive(Clone, Debug, Serialize)]
pub struct MixedRicci {
    /// `R̃ic(s_a, ξ)` over the g̃-orthonormal screen basis.
    pub values: Vec<f64>,
    pub max_abs: f64,
    /// Largest component of the curvature difference formula over coordinate
    /// pairs. The formula assumes a closed rigging; `None` otherwise.
    pub difference_residual: Option<f64>,
}

/// Mixed Ricci components of `g̃` and the residual of
/// `R(U,V)ξ − R̃(U,V)ξ − ḡ(R̄(U,V)ξ,N)ξ + τ(U)A*V − τ(V)A*U` for closed riggings.
pub fn mixed_ricci_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<MixedRicci> {
    let (loc, rc) = rigged_curvature(imm, rig, u)?;
    let sd = shape_at(imm, rig, u)?;
    let rs = &sd.rigged;
    let m = imm.param_dim();
    let xi = &rs.xi_param;
    let values: Vec<f64> = rs.screen_basis.iter().map(|s| rc.ricci_form(s, xi)).collect();

    let max_abs = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if d_alpha_at(&imm.chart, rig, &rs.point)?.amax() >= 1e-9 {
        return Ok(MixedRicci {
            values,
            max_abs,
            difference_residual: None,
        });
    }
    let (conn, dconn) = induced_connection(imm, &loc)?;
    let r_ind = CurvatureData {
        dim: m,
        metric: rs.gtilde.clone(),
        riemann: crate::geometry::riemann_from_connection(&conn, &dconn),
        christoffel: conn,
        ricci: DMatrix::zeros(m, m),
    };
    let amb = curvature_at(imm.chart.as_ref(), &rs.point)?;
    let mut diff = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let (ui, vj) = (unit(m, i), unit(m, j));
            let r = r_ind.apply(&ui, &vj, xi);
            let rt = rc.apply(&ui, &vj, xi);
            let rb = amb.apply(&rs.push(&ui), &rs.push(&vj), &rs.xi);
            let nrm = inner(&rs.gbar, &rb, &rs.transversal);
            let au = sd.apply_astar(&ui);
            let av = sd.apply_astar(&vj);
            for k in 0..m {
                let v = r[k] - rt[k] - nrm * xi[k] + sd.tau[i] * av[k] - sd.tau[j] * au[k];
                diff = diff.max(v.abs());
            }
        }
    }
    Ok(MixedRicci {
        values,
        max_abs,
        difference_residual: Some(diff),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafRoute {
    /// Intrinsic curvature of the integral leaf of `ker ω`.
    Leaf,
    /// Gauss equation in `(M, g̃)` with the symmetrized `−∇̃ω` on the screen.
    Projected,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScreenSectional {
    pub k_bar: f64,
    pub k_tilde_screen: f64,
    pub route: LeafRoute,
    /// `K̃(X,Y) + (B(X,X)B(Y,Y) − B(X,Y)²)/Q`, independent of the leaf construction.
    pub gauss_cross_check: f64,
    pub residual: f64,
}

/// Leaf of `ker ω` through `u` as a graph `u_k = G(w)`, to jet order `order` in `w`.
fn leaf_parametrization(loc: &LocalRigging, k: usize, order: usize) -> Vec<Jet> {
    let m = loc.param_dim();
    let u0 = &loc.u;
    let w0: Vec<f64> = (0..m).filter(|&j| j != k).map(|j| u0[j]).collect();
    let w = Jet::variables(&w0, order);
    let nw = m - 1;
    let build = |g: &Jet| -> Vec<Jet> {
        let mut out = Vec::with_capacity(m);
        let mut it = w.iter();
        for j in 0..m {
            out.push(if j == k { g.clone() } else { it.next().expect("free coordinate").clone() });
        }
        out
    };
    let mut g = Jet::constant_like(u0[k], &w[0]);
    let bounds: Vec<usize> = (0..=order).map(|d| layout(nw, d).len()).collect();
    for _ in 0..=order {
        let uw = build(&g);
        let om: Vec<Jet> = loc.omega.iter().map(|o| o.compose(&uw)).collect();
        // P = Σ_j δw_j ∂G/∂w_j, then a degree-D monomial of P contributes P_D / D
        let mut p = Jet::constant_like(0.0, &w[0]);
        for (jw, j) in (0..m).filter(|&j| j != k).enumerate() {
            let slope = -(&om[j] / &om[k]);
            let mut dw = w[jw].clone();
            dw -= &Jet::constant(w0[jw]);
            p += &(&dw * &slope);
        }
        let mut coeffs = p.coeffs().to_vec();
        coeffs[0] = u0[k];
        for d in 1..=order {
            for c in &mut coeffs[bounds[d - 1]..bounds[d]] {
                *c /= d as f64;
            }
        }
        g = Jet::from_coeffs(nw, order, coeffs);
    }
    build(&g)
}

/// Symmetrized `−∇̃ω` in parameter components.
fn minus_nabla_omega(loc: &LocalRigging) -> Result<DMatrix<f64>> {
    let m = loc.param_dim();
    let d = MetricDerivs::from_jets(&loc.gtilde, m, Signature::Riemannian, &loc.u, 1)?;
    let gamma = d.christoffel();
    let omega: Vec<f64> = loc.omega.iter().map(Jet::value).collect();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let mut v = loc.omega[j].partial(&[i]);
            for k in 0..m {
                v -= gamma.get(k, i, j) * omega[k];
            }
            out[(i, j)] = -v;
        }
    }
    Ok((&out + out.transpose()) * 0.5)
}

/// Check `K̄(X,Y) = K̃^S(X,Y) − C(X,X)B(Y,Y) − B(X,X)C(Y,Y) + 2C(X,Y)B(X,Y)` for
/// screen vectors `x, y` given in parameter components. The `C`–`B` terms are
/// divided by `Q = g(X,X)g(Y,Y) − g(X,Y)²`, so `x, y` need not be orthonormal.
pub fn screen_sectional_relation_at(
    imm: &Immersion,
    rig: &RiggingField,
    u: &[f64],
    x: &[f64],
    y: &[f64],
) -> Result<ScreenSectional> {
    let m = imm.param_dim();
    if m < 3 {
        return Err(Error::InvalidSpec("screen sectional curvature needs ambient dimension at least 4".into()));
    }
    let (loc, rc) = rigged_curvature(imm, rig, u)?;
    let sd = shape_from_local(imm, &loc, crate::rigging::rigged_structure_at(imm, rig, u)?)?;
    let rs = &sd.rigged;
    let q = rs.gtilde_inner(x, x) * rs.gtilde_inner(y, y) - rs.gtilde_inner(x, y).powi(2);
    let scale = rs.gtilde_inner(x, x) * rs.gtilde_inner(y, y);
    if !(q > 1e-12 * scale) {
        return Err(Error::DegenerateSpan);
    }
    let amb = curvature_at(imm.chart.as_ref(), &rs.point)?;
    let k_bar = amb.sectional(&rs.push(x), &rs.push(y))?;
    let (b, c) = (|p: &[f64], r: &[f64]| sd.b_form(p, r), |p: &[f64], r: &[f64]| sd.c_form(p, r));
    let coupling = (c(x, x) * b(y, y) + b(x, x) * c(y, y) - b(x, y) * (c(x, y) + c(y, x))) / q;

    let bs = minus_nabla_omega(&loc)?;
    let k_tilde = rc.sectional(x, y)?;
    let cross = k_tilde + (inner(&bs, x, x) * inner(&bs, y, y) - inner(&bs, x, y).powi(2)) / q;

    let closed = d_alpha_at(&imm.chart, rig, &rs.point)?.amax() < 1e-9;
    let (k_s, route) = if closed {
        let kk = (0..m)
            .max_by(|&a, &b| rs.omega[a].abs().total_cmp(&rs.omega[b].abs()))
            .expect("nonempty");
        let uw = leaf_parametrization(&loc, kk, 3);
        let yl = imm.eval(&uw);
        let nw = m - 1;
        let yt: Vec<Jet> = yl.iter().map(|c| c.truncate(2)).collect();
        let gb = imm.chart.eval(&yt);
        let n = yl.len();
        let el: Vec<Vec<Jet>> = (0..nw).map(|j| yl.iter().map(|c| c.derivative(j)).collect()).collect();
        let mut h = Vec::with_capacity(nw * nw);
        for i in 0..nw {
            for j in 0..nw {
                let mut s = Jet::constant(0.0);
                for a in 0..n {
                    for bb in 0..n {
                        s += &(&(&gb[a * n + bb] * &el[i][a]) * &el[j][bb]);
                    }
                }
                h.push(s);
            }
        }
        let w0: Vec<f64> = (0..m).filter(|&j| j != kk).map(|j| u[j]).collect();
        let d = MetricDerivs::from_jets(&h, nw, Signature::Riemannian, &w0, 2)?;
        let leaf = CurvatureData::from_derivs(&d);
        let drop = |v: &[f64]| -> Vec<f64> { (0..m).filter(|&j| j != kk).map(|j| v[j]).collect() };
        (leaf.sectional(&drop(x), &drop(y))?, LeafRoute::Leaf)
    } else {
        (cross, LeafRoute::Projected)
    };
    Ok(ScreenSectional {
        k_bar,
        k_tilde_screen: k_s,
        route,
        gauss_cross_check: cross,
        residual: (k_bar - k_s + coupling).abs(),
    })
}

/// Screen sectional relation on the first two screen basis vectors.
pub fn screen_sectional_default_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<ScreenSectional> {
    let rs = crate::rigging::rigged_structure_at(imm, rig, u)?;
    if rs.screen_basis.len() < 2 {
        return Err(Error::InvalidSpec("screen sectional curvature needs ambient dimension at least 4".into()));
    }
    screen_sectional_relation_at(imm, rig, u, &rs.screen_basis[0], &rs.screen_basis[1])
}

#[derive(Clone, Debug, Serialize)]
pub struct Raychaudhuri {
    pub ric_xi: f64,
    pub xi_h: f64,
    pub tau_xi: f64,
    pub mean_curvature: f64,
    pub astar_norm_sq: f64,
    pub residual: f64,
}

fn mean_curvature_near(imm: &Immersion, rig: &RiggingField, u: &[f64], dir: &[f64], s: f64) -> Result<f64> {
    let p: Vec<f64> = u.iter().zip(dir).map(|(a, b)| a + s * b).collect();
    Ok(shape_at(imm, rig, &p)?.mean_curvature)
}

/// `ξ(H)` by Richardson-extrapolated central differences.
fn xi_derivative_of_h(imm: &Immersion, rig: &RiggingField, u: &[f64], xi: &[f64]) -> Result<f64> {
    let nx = xi.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut h = 1e-3 / nx;
    let mut last_err = None;
    for _ in 0..8 {
        let d = |s: f64| -> Result<f64> {
            Ok((mean_curvature_near(imm, rig, u, xi, s)? - mean_curvature_near(imm, rig, u, xi, -s)?) / (2.0 * s))
        };
        match (d(h), d(0.5 * h)) {
            (Ok(a), Ok(b)) => return Ok((4.0 * b - a) / 3.0),
            (Err(e), _) | (_, Err(e)) => last_err = Some(e),
        }
        h *= 0.25;
    }
    Err(last_err.expect("at least one attempt"))
}

/// `|Ric̄(ξ,ξ) − ξ(H) − τ(ξ)H + |A*ξ|²|`.
pub fn raychaudhuri_residual_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<Raychaudhuri> {
    let sd = shape_at(imm, rig, u)?;
    let rs = &sd.rigged;
    let amb = curvature_at(imm.chart.as_ref(), &rs.point)?;
    let ric_xi = amb.ricci_form(&rs.xi, &rs.xi);
    let xi_h = xi_derivative_of_h(imm, rig, u, &rs.xi_param)?;
    let tau_xi = sd.tau_of(&rs.xi_param);
    let a2 = sd.astar_norm_sq();
    let hh = sd.mean_curvature;
    Ok(Raychaudhuri {
        ric_xi,
        xi_h,
        tau_xi,
        mean_curvature: hh,
        astar_norm_sq: a2,
        residual: (ric_xi - xi_h - tau_xi * hh + a2).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceCheck {
    pub mean_curvature: f64,
    pub divergence: f64,
    /// `|H + diṽ ξ|`.
    pub residual: f64,
}

/// `H = −diṽ ξ`, with `div V = ∂_i V^i + ½ g̃^{il} ∂_k g̃_{il} V^k`.
pub fn divergence_check_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<DivergenceCheck> {
    let loc = local_rigging(imm, rig, u, 1)?;
    let m = loc.param_dim();
    let g = loc.gtilde_value();
    let gi = g.try_inverse().ok_or(Error::DegenerateSpan)?;
    let mut div = 0.0;
    for k in 0..m {
        div += loc.xi_param[k].partial(&[k]);
        let dg = jets_to_matrix(&loc.gtilde, m, |j| j.partial(&[k]));
        div += 0.5 * (&gi * dg).trace() * loc.xi_param[k].value();
    }
    let rs = crate::rigging::rigged_structure_at(imm, rig, u)?;
    let sd = shape_from_local(imm, &loc, rs)?;
    Ok(DivergenceCheck {
        mean_curvature: sd.mean_curvature,
        divergence: div,
        residual: (sd.mean_curvature + div).abs(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientCheck {
    /// `max |∇̃(f∘i) − ξ|` in parameter components.
    pub residual: f64,
    /// `|g̃(ξ,ξ) − 1|`.
    pub unit_residual: f64,
}

/// Restriction `f∘i` of the rigging potential as a jet in `u`.
fn restricted_potential(imm: &Immersion, rig: &RiggingField, u: &[f64], order: usize) -> Result<Jet> {
    let pot = rig
        .potential
        .as_ref()
        .ok_or_else(|| Error::NotGradient(rig.label.clone()))?;
    Ok(pot(&imm.eval(&Jet::variables(u, order))))
}

/// For a gradient rigging `ζ = ∇̄f`: `∇̃(f∘i) = ξ` and `g̃(ξ,ξ) = 1`.
pub fn gradient_identity_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<GradientCheck> {
    let fi = restricted_potential(imm, rig, u, 1)?;
    let rs = crate::rigging::rigged_structure_at(imm, rig, u)?;
    let grad = rs
        .gtilde
        .clone()
        .lu()
        .solve(&DVector::from_vec(fi.gradient()))
        .ok_or(Error::DegenerateSpan)?;
    let residual = grad
        .iter()
        .zip(&rs.xi_param)
        .fold(0.0f64, |a, (g, x)| a.max((g - x).abs()));
    Ok(GradientCheck {
        residual,
        unit_residual: (rs.gtilde_inner(&rs.xi_param, &rs.xi_param) - 1.0).abs(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    Zero,
    PositiveSemidefinite,
    NegativeSemidefinite,
    Indefinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct HessianReport {
    /// `max |Hess̃(f∘i) + B|` over coordinate pairs and samples.
    pub residual: f64,
    /// Definiteness of `B` on the screen, over all samples.
    pub b_screen: Definiteness,
    /// `f∘i` convex, i.e. `B ≤ 0` on the screen.
    pub convex: bool,
    /// Convex after `ζ ← −ζ` (which flips the signs of `B` and `f`).
    pub convex_after_flip: bool,
    pub failures: Vec<(usize, String)>,
}

fn hessian_residual_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<(f64, DMatrix<f64>)> {
    let fi = restricted_potential(imm, rig, u, 2)?;
    let loc = local_rigging(imm, rig, u, 1)?;
    let m = loc.param_dim();
    let d = MetricDerivs::from_jets(&loc.gtilde, m, Signature::Riemannian, u, 1)?;
    let gamma = d.christoffel();
    let grad = fi.gradient();
    let sd: ShapeData = shape_from_local(imm, &loc, crate::rigging::rigged_structure_at(imm, rig, u)?)?;
    let mut r = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let mut hess = fi.partial(&[i, j]);
            for k in 0..m {
                hess -= gamma.get(k, i, j) * grad[k];
            }
            r = r.max((hess + sd.b[(i, j)]).abs());
        }
    }
    Ok((r, sd.b_screen()))
}

/// `Hess̃(f∘i) = −B` for a gradient rigging, with a convexity verdict for `f∘i`.
pub fn hessian_convexity_check(imm: &Immersion, rig: &RiggingField, samples: &[Vec<f64>]) -> Result<HessianReport> {
    if rig.potential.is_none() {
        return Err(Error::NotGradient(rig.label.clone()));
    }
    let mut residual = 0.0f64;
    let (mut lo, mut hi, mut scale) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    let mut failures = Vec::new();
    for (k, u) in samples.iter().enumerate() {
        match hessian_residual_at(imm, rig, u) {
            Ok((r, bs)) => {
                residual = residual.max(r);
                scale = scale.max(bs.amax());
                let ev = SymmetricEigen::new(bs).eigenvalues;
                lo = lo.min(ev.min());
                hi = hi.max(ev.max());
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    let tol = 1e-9 * scale.max(1.0);
    let b_screen = if scale < 1e-9 {
        Definiteness::Zero
    } else if lo >= -tol {
        Definiteness::PositiveSemidefinite
    } else if hi <= tol {
        Definiteness::NegativeSemidefinite
    } else {
        Definiteness::Indefinite
    };
    let convex = matches!(b_screen, Definiteness::Zero | Definiteness::NegativeSemidefinite);
    let convex_after_flip = matches!(b_screen, Definiteness::Zero | Definiteness::PositiveSemidefinite);
    Ok(HessianReport {
        residual,
        b_screen,
        convex,
        convex_after_flip,
        failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVerdict {
    Verified,
    Violated,
    NotApplicable,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundSample {
    pub index: usize,
    pub closed: bool,
    pub tau_xi: f64,
    pub ric_xi: f64,
    pub mean_curvature: f64,
    pub astar_norm_sq: f64,
    /// `|Ric̄(ξ,ξ) − R̃ic(ξ,ξ) − τ(ξ)H|`, for closed riggings.
    pub ricci_identity_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub k: f64,
    pub verdict: BoundVerdict,
    /// Why the hypotheses do not hold, when they do not.
    pub reasons: Vec<String>,
    pub max_abs_h: f64,
    pub min_ric_xi: f64,
    pub max_ricci_identity_residual: f64,
    pub samples: Vec<BoundSample>,
    pub failures: Vec<(usize, String)>,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundTolerances {
    pub closed: f64,
    pub tau_xi: f64,
    /// Slack in `Ric̄(ξ,ξ) ≥ −k` and `|H| ≤ k`.
    pub slack: f64,
}

impl Default for BoundTolerances {
    fn default() -> Self {
        BoundTolerances {
            closed: 1e-9,
            tau_xi: 1e-9,
            slack: 1e-8,
        }
    }
}

fn bound_sample(imm: &Immersion, rig: &RiggingField, u: &[f64], closed_tol: f64) -> Result<(BoundSample, bool)> {
    let (_, rc) = rigged_curvature(imm, rig, u)?;
    let sd = shape_at(imm, rig, u)?;
    let rs = &sd.rigged;
    let amb = curvature_at(imm.chart.as_ref(), &rs.point)?;
    let ric_xi = amb.ricci_form(&rs.xi, &rs.xi);
    let closed = d_alpha_at(&imm.chart, rig, &rs.point)?.amax() < closed_tol;
    let tau_xi = sd.tau_of(&rs.xi_param);
    let h = sd.mean_curvature;
    let ident = closed.then(|| (ric_xi - rc.ricci_form(&rs.xi_param, &rs.xi_param) - tau_xi * h).abs());
    Ok((
        BoundSample {
            index: 0,
            closed,
            tau_xi,
            ric_xi,
            mean_curvature: h,
            astar_norm_sq: sd.astar_norm_sq(),
            ricci_identity_residual: ident,
        },
        closed,
    ))
}

/// Check the hypotheses of the mean-curvature bound `|H| ≤ k` per sample and,
/// when they hold and the probe found no incompleteness witness, the bound itself.
pub fn mean_curvature_bound_check(
    imm: &Immersion,
    rig: &RiggingField,
    samples: &[Vec<f64>],
    k: f64,
    probe: &ProbeReport,
    tol: BoundTolerances,
) -> BoundReport {
    let mut out = Vec::new();
    let mut failures = Vec::new();
    for (i, u) in samples.iter().enumerate() {
        match bound_sample(imm, rig, u, tol.closed) {
            Ok((mut s, _)) => {
                s.index = i;
                out.push(s);
            }
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let mut reasons = Vec::new();
    if !failures.is_empty() {
        reasons.push(format!("{} samples could not be evaluated", failures.len()));
    }
    if out.iter().any(|s| !s.closed) {
        reasons.push("rigging not closed".into());
    }
    if out.iter().any(|s| s.tau_xi.abs() > tol.tau_xi) {
        reasons.push("tau(xi) does not vanish".into());
    }
    let min_ric = out.iter().map(|s| s.ric_xi).fold(f64::INFINITY, f64::min);
    if min_ric < -k - tol.slack {
        reasons.push(format!("Ric(xi,xi) reaches {min_ric:.6e} < -k"));
    }
    if probe.verdict == ProbeVerdict::IncompletenessWitnessFound {
        reasons.push("completeness probe found an incompleteness witness".into());
    }
    let max_abs_h = out.iter().map(|s| s.mean_curvature.abs()).fold(0.0, f64::max);
    let verdict = if !reasons.is_empty() {
        BoundVerdict::NotApplicable
    } else if max_abs_h <= k + tol.slack {
        BoundVerdict::Verified
    } else {
        BoundVerdict::Violated
    };
    BoundReport {
        k,
        verdict,
        reasons,
        max_abs_h,
        min_ric_xi: min_ric,
        max_ricci_identity_residual: out
            .iter()
            .filter_map(|s| s.ricci_identity_residual)
            .fold(0.0, f64::max),
        samples: out,
        failures,
    }
}

/// For umbilic data with `B = ρ g` on an `n`-dimensional screen, `H = nρ` and
/// `|A*ξ|² = nρ²`, so `|H| ≤ |A*ξ|²` exactly when `|ρ| ≥ 1`. Returns whether the
/// reported pair agrees with that equivalence (up to `tol`, away from `|ρ| = 1`).
pub fn umbilic_bound_arithmetic(h: f64, astar_norm_sq: f64, n: usize, tol: f64) -> bool {
    let rho = h / n as f64;
    if ((rho.abs() - 1.0).abs()) < tol {
        return true;
    }
    (h.abs() <= astar_norm_sq + tol) == (rho.abs() >= 1.0)
}

/// Rigged chart curvature at `u`, for callers that already hold a chart.
pub fn rigged_curvature_at(chart: &RiggedMetricChart, u: &[f64]) -> Result<CurvatureData> {
    Ok(rigged_curvature(&chart.imm, &chart.rig, u)?.1)
}

/// Pushforward of a parameter vector through the immersion at `u`.
pub fn push_at(imm: &Immersion, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    let f = crate::hypersurface::frame_at(imm, u)?;
    Ok(push_forward(&f.basis, v))
}
