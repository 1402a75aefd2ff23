//! Second fundamental forms, shape operators, rotation form and mean
//! curvature of a rigged null hypersurface, with the structural identity suite.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{christoffel, inner, jets_to_matrix, Christoffel};
use crate::hypersurface::Immersion;
use crate::jet::Jet;
use crate::rigging::{
    conformal_factor_at, d_alpha_at, local_rigging, rigged_structure_at, LocalRigging,
    RiggedStructure, RiggingField,
};

/// Shape data at one point, in parameter components.
#[derive(Clone, Debug)]
pub struct ShapeData {
    pub rigged: RiggedStructure,
    /// `B_ij = ḡ(∇̄_i ∂_j x, ξ)`.
    pub b: DMatrix<f64>,
    /// `−ḡ(∇̄_i ξ, ∂_j x)`, equal to `b` by the Gauss formula.
    pub b_weingarten: DMatrix<f64>,
    /// `C_ij = ḡ(A_N ∂_i, ∂_j)`.
    pub c: DMatrix<f64>,
    /// `ḡ(∇̄_i P∂_j, N)` with `P∂_j = ∂_j − ω_j ξ`.
    pub c_gauss: DMatrix<f64>,
    /// Column `i` holds `A*ξ ∂_i`.
    pub astar: DMatrix<f64>,
    /// `A*ξ` recovered from `B` by raising on the screen.
    pub astar_raised: DMatrix<f64>,
    /// Column `i` holds `A_N ∂_i`.
    pub an: DMatrix<f64>,
    pub tau: Vec<f64>,
    /// Trace of `A*ξ` over a g̃-orthonormal screen basis.
    pub mean_curvature: f64,
    /// Largest transversal (N) component found in `A*ξ X` and `A_N X`.
    pub tangency_defect: f64,
}

impl ShapeData {
    pub fn param_dim(&self) -> usize {
        self.tau.len()
    }

    pub fn screen_matrix(&self) -> DMatrix<f64> {
        let m = self.param_dim();
        DMatrix::from_fn(m, m - 1, |i, a| self.rigged.screen_basis[a][i])
    }

    /// `B(s_a, s_b)` on the g̃-orthonormal screen basis.
    pub fn b_screen(&self) -> DMatrix<f64> {
        let s = self.screen_matrix();
        s.transpose() * &self.b * s
    }

    /// `C(s_a, s_b) = ḡ(A_N s_a, s_b)`.
    pub fn c_screen(&self) -> DMatrix<f64> {
        let s = self.screen_matrix();
        s.transpose() * &self.c * s
    }

    pub fn b_form(&self, x: &[f64], y: &[f64]) -> f64 {
        inner(&self.b, x, y)
    }

    pub fn c_form(&self, x: &[f64], y: &[f64]) -> f64 {
        inner(&self.c, x, y)
    }

    pub fn tau_of(&self, x: &[f64]) -> f64 {
        self.tau.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `Σ` of squared eigenvalues of `A*ξ` restricted to the screen.
    pub fn astar_norm_sq(&self) -> f64 {
        let b = self.b_screen();
        b.iter().map(|v| v * v).sum()
    }

    pub fn apply_astar(&self, x: &[f64]) -> Vec<f64> {
        (&self.astar * DVector::from_column_slice(x)).iter().copied().collect()
    }

    pub fn apply_an(&self, x: &[f64]) -> Vec<f64> {
        (&self.an * DVector::from_column_slice(x)).iter().copied().collect()
    }
}

/// Ambient covariant derivative `∇̄_{∂_i} V` at the base point of `loc`.
pub(crate) fn cov(loc: &LocalRigging, gamma: &Christoffel, i: usize, v: &[Jet]) -> Vec<f64> {
    let e: Vec<f64> = loc.e[i].iter().map(Jet::value).collect();
    let vv: Vec<f64> = v.iter().map(Jet::value).collect();
    let corr = gamma.contract(&e, &vv);
    v.iter().zip(corr).map(|(c, k)| c.partial(&[i]) + k).collect()
}

/// Coefficients of `v` in the basis `(∂_1 x, …, ∂_m x, N)`.
pub(crate) fn decompose(loc: &LocalRigging, v: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = loc.ambient_dim();
    let m = loc.param_dim();
    let mat = DMatrix::from_fn(n, n, |a, k| {
        if k < m {
            loc.e[k][a].value()
        } else {
            loc.transversal[a].value()
        }
    });
    let sol = mat
        .lu()
        .solve(&DVector::from_column_slice(v))
        .ok_or(Error::DegenerateSpan)?;
    Ok((sol.rows(0, m).iter().copied().collect(), sol[m]))
}

fn gbar_val(g: &DMatrix<f64>, x: &[f64], y: &[Jet]) -> f64 {
    let yv: Vec<f64> = y.iter().map(Jet::value).collect();
    inner(g, x, &yv)
}

/// Shape data from already built first-order local jets (`x` to order 2).
pub(crate) fn shape_from_local(
    imm: &Immersion,
    loc: &LocalRigging,
    rigged: RiggedStructure,
) -> Result<ShapeData> {
    let m = loc.param_dim();
    let n = loc.ambient_dim();
    let gamma = christoffel(imm.chart.as_ref(), &rigged.point)?;
    let g = &rigged.gbar;
    let xi = &loc.xi;
    let nv = &loc.transversal;
    let mut b = DMatrix::zeros(m, m);
    let mut b_w = DMatrix::zeros(m, m);
    let mut c_gauss = DMatrix::zeros(m, m);
    let mut tau = vec![0.0; m];
    let mut astar = DMatrix::zeros(m, m);
    let mut an = DMatrix::zeros(m, m);
    let mut defect = 0.0f64;

    let dxi: Vec<Vec<f64>> = (0..m).map(|i| cov(loc, &gamma, i, xi)).collect();
    let dn: Vec<Vec<f64>> = (0..m).map(|i| cov(loc, &gamma, i, nv)).collect();
    for i in 0..m {
        tau[i] = gbar_val(g, &dn[i], xi);
        for j in 0..m {
            let dij = cov(loc, &gamma, i, &loc.e[j]);
            b[(i, j)] = gbar_val(g, &dij, xi);
            b_w[(i, j)] = -gbar_val(g, &dxi[i], &loc.e[j]);
            // P∂_j = ∂_j − ω_j ξ as a field
            let pj: Vec<Jet> = (0..n)
                .map(|a| &loc.e[j][a] - &(&loc.omega[j] * &xi[a]))
                .collect();
            c_gauss[(i, j)] = gbar_val(g, &cov(loc, &gamma, i, &pj), nv);
        }
    }
    for i in 0..m {
        let xiv: Vec<f64> = xi.iter().map(Jet::value).collect();
        let nvv: Vec<f64> = nv.iter().map(Jet::value).collect();
        let wa: Vec<f64> = (0..n).map(|a| -dxi[i][a] - tau[i] * xiv[a]).collect();
        let (ca, na) = decompose(loc, &wa)?;
        let wn: Vec<f64> = (0..n).map(|a| -(dn[i][a] - tau[i] * nvv[a])).collect();
        let (cn, nn) = decompose(loc, &wn)?;
        defect = defect.max(na.abs()).max(nn.abs());
        for k in 0..m {
            astar[(k, i)] = ca[k];
            an[(k, i)] = cn[k];
        }
    }
    let induced = &rigged.induced;
    let c = an.transpose() * induced;
    let s = DMatrix::from_fn(m, m - 1, |i, a| rigged.screen_basis[a][i]);
    let astar_raised = &s * s.transpose() * &b;
    let mean_curvature = (s.transpose() * &b * &s).trace();
    Ok(ShapeData {
        rigged,
        b,
        b_weingarten: b_w,
        c,
        c_gauss,
        astar,
        astar_raised,
        an,
        tau,
        mean_curvature,
        tangency_defect: defect,
    })
}

pub fn shape_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<ShapeData> {
    let rigged = rigged_structure_at(imm, rig, u)?;
    let loc = local_rigging(imm, rig, u, 1)?;
    shape_from_local(imm, &loc, rigged)
}

/// Outcome of one named identity check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: Option<f64>,
    /// Reason when the hypotheses of the check do not hold.
    pub skipped: Option<String>,
}

impl IdentityCheck {
    fn value(name: &str, r: f64) -> IdentityCheck {
        IdentityCheck {
            name: name.to_string(),
            residual: Some(r),
            skipped: None,
        }
    }

    fn skip(name: &str, why: &str) -> IdentityCheck {
        IdentityCheck {
            name: name.to_string(),
            residual: None,
            skipped: Some(why.to_string()),
        }
    }
}

/// Thresholds deciding whether hypotheses of conditional checks hold.
#[derive(Clone, Copy, Debug)]
pub struct HypothesisTolerances {
    pub closed: f64,
    pub conformal: f64,
    pub tau_xi: f64,
}

impl Default for HypothesisTolerances {
    fn default() -> Self {
        HypothesisTolerances {
            closed: 1e-9,
            conformal: 1e-9,
            tau_xi: 1e-9,
        }
    }
}

/// Every structural identity at `u`, as named residuals.
pub fn identity_suite_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<Vec<IdentityCheck>> {
    identity_suite_with(imm, rig, u, HypothesisTolerances::default())
}

pub fn identity_suite_with(
    imm: &Immersion,
    rig: &RiggingField,
    u: &[f64],
    hyp: HypothesisTolerances,
) -> Result<Vec<IdentityCheck>> {
    let rigged = rigged_structure_at(imm, rig, u)?;
    let loc = local_rigging(imm, rig, u, 1)?;
    let sd = shape_from_local(imm, &loc, rigged)?;
    let rs = &sd.rigged;
    let m = sd.param_dim();
    let gamma = christoffel(imm.chart.as_ref(), &rs.point)?;
    let xi = &rs.xi_param;
    let omega = &rs.omega;
    let h = &rs.induced;
    let mut out = Vec::new();
    let mx = |m: &DMatrix<f64>| m.amax();

    out.push(IdentityCheck::value("gauss_weingarten_consistency", mx(&(&sd.b - &sd.b_weingarten))));
    out.push(IdentityCheck::value("b_symmetric", mx(&(&sd.b - sd.b.transpose()))));
    let bxi = &sd.b * DVector::from_column_slice(xi);
    out.push(IdentityCheck::value("b_radical", bxi.amax()));
    out.push(IdentityCheck::value("astar_xi", DVector::from_vec(sd.apply_astar(xi)).amax()));
    let om = DVector::from_column_slice(omega);
    let screen_valued = (om.transpose() * &sd.astar)
        .amax()
        .max((om.transpose() * &sd.an).amax());
    out.push(IdentityCheck::value("shape_operators_screen_valued", screen_valued));
    out.push(IdentityCheck::value("weingarten_tangency", sd.tangency_defect));
    // B(X,Y) = ḡ(A*X, Y)
    let b_from_astar = sd.astar.transpose() * h;
    out.push(IdentityCheck::value("b_from_astar", mx(&(&b_from_astar - &sd.b))));
    out.push(IdentityCheck::value("astar_raised", mx(&(&sd.astar - &sd.astar_raised))));
    out.push(IdentityCheck::value("screen_form_consistency", mx(&(&sd.c - &sd.c_gauss))));

    // (∇_X h)(Y,Z) = B(X,Y)ω(Z) + B(X,Z)ω(Y), ∇ from the Gauss formula
    let mut conn = vec![vec![vec![0.0; m]; m]; m]; // conn[i][j][k]: ∇_i ∂_j = conn^k ∂_k
    let mut conn_defect = 0.0f64;
    let n = loc.ambient_dim();
    let nvv: Vec<f64> = loc.transversal.iter().map(Jet::value).collect();
    for i in 0..m {
        for j in 0..m {
            let d = cov(&loc, &gamma, i, &loc.e[j]);
            let w: Vec<f64> = (0..n).map(|a| d[a] - sd.b[(i, j)] * nvv[a]).collect();
            let (c, nc) = decompose(&loc, &w)?;
            conn_defect = conn_defect.max(nc.abs());
            conn[i][j] = c;
        }
    }
    let mut derc = conn_defect;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut r = loc.induced[j * m + k].partial(&[i]);
                for l in 0..m {
                    r -= conn[i][j][l] * h[(l, k)] + conn[i][k][l] * h[(j, l)];
                }
                r -= sd.b[(i, j)] * omega[k] + sd.b[(i, k)] * omega[j];
                derc = derc.max(r.abs());
            }
        }
    }
    out.push(IdentityCheck::value("induced_connection_derc", derc));

    // ḡ(A_N X,Y) − ḡ(A_N Y,X) − τ(X)α(Y) + τ(Y)α(X) + dα(X,Y)
    let mut perm = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let dom = loc.omega[j].partial(&[i]) - loc.omega[i].partial(&[j]);
            let r = sd.c[(i, j)] - sd.c[(j, i)] - sd.tau[i] * omega[j] + sd.tau[j] * omega[i] + dom;
            perm = perm.max(r.abs());
        }
    }
    out.push(IdentityCheck::value("an_antisymmetry", perm));

    let closed = d_alpha_at(&imm.chart, rig, &rs.point)?.amax() < hyp.closed;
    let tau_xi = sd.tau_of(xi);
    if closed {
        let an_xi = sd.apply_an(xi);
        let mut r = 0.0f64;
        for j in 0..m {
            let mut ej = vec![0.0; m];
            ej[j] = 1.0;
            r = r.max((sd.tau[j] + inner(h, &an_xi, &ej) - tau_xi * omega[j]).abs());
        }
        out.push(IdentityCheck::value("tau_from_an_xi", r));
        if tau_xi.abs() < hyp.tau_xi {
            let sharp = rs
                .gtilde
                .clone()
                .lu()
                .solve(&DVector::from_column_slice(&sd.tau))
                .ok_or(Error::DegenerateSpan)?;
            let r = (DVector::from_vec(an_xi) + sharp).amax();
            out.push(IdentityCheck::value("an_xi_sharp_tau", r));
        } else {
            out.push(IdentityCheck::skip("an_xi_sharp_tau", "tau(xi) != 0"));
        }
    } else {
        out.push(IdentityCheck::skip("tau_from_an_xi", "rigging not closed"));
        out.push(IdentityCheck::skip("an_xi_sharp_tau", "rigging not closed"));
    }

    // ∇̄_ξ ξ + τ(ξ) ξ
    let mut pre = vec![0.0; n];
    for i in 0..m {
        let d = cov(&loc, &gamma, i, &loc.xi);
        for a in 0..n {
            pre[a] += xi[i] * d[a];
        }
    }
    let pre_r = pre
        .iter()
        .zip(&rs.xi)
        .map(|(p, x)| (p + tau_xi * x).abs())
        .fold(0.0, f64::max);
    out.push(IdentityCheck::value("xi_pregeodesic", pre_r));

    // (L_ξ g̃)(X,Y) + 2B(X,Y) on the screen
    let lie = DMatrix::from_fn(m, m, |i, j| {
        let mut s = 0.0;
        for k in 0..m {
            s += xi[k] * loc.gtilde[i * m + j].partial(&[k])
                + rs.gtilde[(k, j)] * loc.xi_param[k].partial(&[i])
                + rs.gtilde[(i, k)] * loc.xi_param[k].partial(&[j]);
        }
        s
    });
    let smat = sd.screen_matrix();
    let lie_r = (smat.transpose() * (lie + &sd.b * 2.0) * &smat).amax();
    out.push(IdentityCheck::value("lie_xi_gtilde", lie_r));

    if closed {
        // g̃(∇̃_X Y, ξ) for screen fields Y equals −(∇̃_X ω)(Y)
        let gt = jets_to_matrix(&loc.gtilde, m, Jet::value);
        let gti = gt.clone().try_inverse().ok_or(Error::DegenerateSpan)?;
        let dgt: Vec<DMatrix<f64>> = (0..m)
            .map(|e| jets_to_matrix(&loc.gtilde, m, |j| j.partial(&[e])))
            .collect();
        let mut nabla_omega = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut v = loc.omega[j].partial(&[i]);
                for k in 0..m {
                    let mut gk = 0.0;
                    for l in 0..m {
                        gk += gti[(k, l)] * 0.5 * (dgt[i][(l, j)] + dgt[j][(l, i)] - dgt[l][(i, j)]);
                    }
                    v -= gk * omega[k];
                }
                nabla_omega[(i, j)] = v;
            }
        }
        let r = (smat.transpose() * (-nabla_omega - &sd.b) * &smat).amax();
        out.push(IdentityCheck::value("screen_leaf_form", r));
    } else {
        out.push(IdentityCheck::skip("screen_leaf_form", "rigging not closed"));
    }

    let conformal = conformal_factor_at(&imm.chart, rig, &rs.point)?.1 < hyp.conformal;
    if closed && conformal {
        out.push(IdentityCheck::value(
            "tau_vanishes",
            sd.tau.iter().fold(0.0f64, |a, t| a.max(t.abs())),
        ));
    } else {
        out.push(IdentityCheck::skip("tau_vanishes", "rigging not closed and conformal"));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    TotallyGeodesic,
    TotallyUmbilic,
    ScreenConformal,
    Generic,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    pub kind: Kind,
    pub holds: bool,
    pub max_residual: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub kind: Kind,
    pub candidates: Vec<Candidate>,
    /// `B = umbilic_rho·ḡ` factor per sample.
    pub umbilic_rho: Vec<f64>,
    /// `A_N = φ·A*ξ` factor per sample.
    pub phi: Vec<f64>,
    /// Largest |B| on the screen over all samples.
    pub b_scale: f64,
    pub failures: Vec<(usize, String)>,
}

/// Absolute threshold on |B| for total geodesy, and relative factor for the others.
#[derive(Clone, Copy, Debug)]
pub struct ClassifyTolerances {
    pub geodesic_abs: f64,
    pub relative: f64,
}

impl Default for ClassifyTolerances {
    fn default() -> Self {
        ClassifyTolerances {
            geodesic_abs: 1e-9,
            relative: 1e-6,
        }
    }
}

pub fn classify_hypersurface(
    imm: &Immersion,
    rig: &RiggingField,
    samples: &[Vec<f64>],
    tol: ClassifyTolerances,
) -> Classification {
    let mut b_scale = 0.0f64;
    let mut umb_rho = Vec::new();
    let mut phis = Vec::new();
    let mut umb_res = 0.0f64;
    let mut conf_res = 0.0f64;
    let mut failures = Vec::new();
    let mut phi_min = f64::INFINITY;
    for (k, u) in samples.iter().enumerate() {
        let sd = match shape_at(imm, rig, u) {
            Ok(s) => s,
            Err(e) => {
                failures.push((k, e.to_string()));
                continue;
            }
        };
        let bs = sd.b_screen();
        let dim = bs.nrows();
        b_scale = b_scale.max(bs.amax());
        let rho = sd.mean_curvature / dim as f64;
        umb_rho.push(rho);
        umb_res = umb_res.max((&bs - DMatrix::identity(dim, dim) * rho).amax());
        // operators compared on (screen, ξ) against the screen
        let s = sd.screen_matrix();
        let mut rows = s.clone().insert_column(dim, 0.0);
        rows.set_column(dim, &DVector::from_column_slice(&sd.rigged.xi_param));
        let bx = rows.transpose() * &sd.b * &s;
        let cx = rows.transpose() * &sd.c * &s;
        let bb = bx.dot(&bx);
        let phi = if bb > 0.0 { cx.dot(&bx) / bb } else { f64::NAN };
        phis.push(phi);
        phi_min = phi_min.min(phi.abs());
        let r = if phi.is_finite() { (cx - bx * phi).amax() } else { cx.amax() };
        conf_res = conf_res.max(r);
    }
    let scale = b_scale.max(f64::MIN_POSITIVE);
    let ok = failures.is_empty() && !samples.is_empty();
    let geo = Candidate {
        kind: Kind::TotallyGeodesic,
        holds: ok && b_scale < tol.geodesic_abs,
        max_residual: b_scale,
        tolerance: tol.geodesic_abs,
    };
    let umb = Candidate {
        kind: Kind::TotallyUmbilic,
        holds: ok && umb_res < tol.relative * scale,
        max_residual: umb_res,
        tolerance: tol.relative * scale,
    };
    let conf = Candidate {
        kind: Kind::ScreenConformal,
        holds: ok
            && b_scale >= tol.geodesic_abs
            && phi_min > tol.relative
            && conf_res < tol.relative * scale,
        max_residual: conf_res,
        tolerance: tol.relative * scale,
    };
    let kind = if geo.holds {
        Kind::TotallyGeodesic
    } else if umb.holds {
        Kind::TotallyUmbilic
    } else if conf.holds {
        Kind::ScreenConformal
    } else {
        Kind::Generic
    };
    Classification {
        kind,
        candidates: vec![geo, umb, conf],
        umbilic_rho: umb_rho,
        phi: phis,
        b_scale,
        failures,
    }
}
