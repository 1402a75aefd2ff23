//! Riggings of null hypersurfaces and the induced rigged data
//! `α, ω, g̃, ξ, N`, screen basis and projector.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{inner, jets_to_matrix, metric_at, ChartMetric, JetMap, JetScalar, MetricChart};
use crate::hypersurface::{frame_at, Immersion};
use crate::jet::{self, Jet};

/// A vector field defined near the hypersurface, evaluated in jet arithmetic.
#[derive(Clone)]
pub struct RiggingField {
    pub label: String,
    field: JetMap,
    /// Present when the field is the gradient of this function.
    pub potential: Option<JetScalar>,
}

impl fmt::Debug for RiggingField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RiggingField")
            .field("label", &self.label)
            .field("gradient", &self.potential.is_some())
            .finish()
    }
}

impl RiggingField {
    pub fn new(label: impl Into<String>, field: JetMap) -> RiggingField {
        RiggingField {
            label: label.into(),
            field,
            potential: None,
        }
    }

    pub fn with_potential(mut self, potential: JetScalar) -> RiggingField {
        self.potential = Some(potential);
        self
    }

    pub fn eval(&self, x: &[Jet]) -> Vec<Jet> {
        (self.field)(x)
    }

    pub fn at(&self, x: &[f64]) -> Vec<f64> {
        self.eval(&Jet::variables(x, 0)).iter().map(Jet::value).collect()
    }

    /// The field `c·ζ`; a potential is rescaled along with it.
    pub fn scaled(&self, c: f64) -> RiggingField {
        let f = self.field.clone();
        let field: JetMap = Arc::new(move |x: &[Jet]| f(x).into_iter().map(|v| v * c).collect());
        let potential = self.potential.clone().map(|p| {
            let s: JetScalar = Arc::new(move |x: &[Jet]| p(x) * c);
            s
        });
        RiggingField {
            label: format!("{}*({})", c, self.label),
            field,
            potential,
        }
    }

    /// `ζ ← −ζ`.
    pub fn flipped(&self) -> RiggingField {
        let mut r = self.scaled(-1.0);
        r.label = format!("-({})", self.label);
        r
    }
}

/// Rigged data as jets in the hypersurface parameters `u`, truncated at `order`.
#[derive(Clone, Debug)]
pub struct LocalRigging {
    pub order: usize,
    pub u: Vec<f64>,
    /// Immersion, one order higher than the rest.
    pub x: Vec<Jet>,
    /// `e[i][a] = ∂_i x^a`.
    pub e: Vec<Vec<Jet>>,
    /// Ambient metric along the hypersurface, row-major.
    pub gbar: Vec<Jet>,
    pub zeta: Vec<Jet>,
    pub alpha: Vec<Jet>,
    pub induced: Vec<Jet>,
    pub omega: Vec<Jet>,
    pub gtilde: Vec<Jet>,
    pub xi_param: Vec<Jet>,
    pub xi: Vec<Jet>,
    pub zeta_sq: Jet,
    /// Null transversal `N = ζ − ½ḡ(ζ,ζ)ξ`.
    pub transversal: Vec<Jet>,
}

impl LocalRigging {
    pub fn param_dim(&self) -> usize {
        self.e.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.x.len()
    }

    pub fn gbar_value(&self) -> DMatrix<f64> {
        jets_to_matrix(&self.gbar, self.ambient_dim(), Jet::value)
    }

    pub fn gtilde_value(&self) -> DMatrix<f64> {
        jets_to_matrix(&self.gtilde, self.param_dim(), Jet::value)
    }

    pub fn gbar_jet(&self, x: &[Jet], y: &[Jet]) -> Jet {
        let n = self.ambient_dim();
        let mut s = Jet::constant(0.0);
        for a in 0..n {
            for b in 0..n {
                s += &(&(&self.gbar[a * n + b] * &x[a]) * &y[b]);
            }
        }
        s
    }
}

fn values(v: &[Jet]) -> Vec<f64> {
    v.iter().map(Jet::value).collect()
}

/// Build the rigged data as `u`-jets of the given order. No nullity or
/// transversality diagnostics beyond solvability; see [`rigged_structure_at`].
pub fn local_rigging(
    imm: &Immersion,
    rig: &RiggingField,
    u: &[f64],
    order: usize,
) -> Result<LocalRigging> {
    imm.check_param(u)?;
    let m = imm.param_dim();
    let n = imm.ambient_dim();
    let x = imm.eval(&Jet::variables(u, order + 1));
    let x0 = values(&x);
    imm.chart.check_domain(&x0)?;
    let xt: Vec<Jet> = x.iter().map(|c| c.truncate(order)).collect();
    let e: Vec<Vec<Jet>> = (0..m)
        .map(|i| x.iter().map(|c| c.derivative(i)).collect())
        .collect();
    let gbar = imm.chart.eval(&xt);
    let zeta = rig.eval(&xt);
    let alpha: Vec<Jet> = (0..n)
        .map(|a| (0..n).map(|b| &gbar[a * n + b] * &zeta[b]).sum())
        .collect();
    let zeta_sq: Jet = (0..n).map(|a| &alpha[a] * &zeta[a]).sum();
    let omega: Vec<Jet> = e
        .iter()
        .map(|ei| (0..n).map(|a| &alpha[a] * &ei[a]).sum())
        .collect();
    let mut induced = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut s = Jet::constant(0.0);
            for a in 0..n {
                for b in 0..n {
                    s += &(&(&gbar[a * n + b] * &e[i][a]) * &e[j][b]);
                }
            }
            induced.push(s);
        }
    }
    let gtilde: Vec<Jet> = (0..m * m)
        .map(|k| &induced[k] + &(&omega[k / m] * &omega[k % m]))
        .collect();
    let xi_param = jet::solve(&gtilde, &omega).ok_or_else(|| Error::RiggingTangent {
        point: u.to_vec(),
        pairing: 0.0,
    })?;
    let xi: Vec<Jet> = (0..n)
        .map(|a| (0..m).map(|i| &e[i][a] * &xi_param[i]).sum())
        .collect();
    let half = &zeta_sq * 0.5;
    let transversal: Vec<Jet> = (0..n).map(|a| &zeta[a] - &(&half * &xi[a])).collect();
    Ok(LocalRigging {
        order,
        u: u.to_vec(),
        x,
        e,
        gbar,
        zeta,
        alpha,
        induced,
        omega,
        gtilde,
        xi_param,
        xi,
        zeta_sq,
        transversal,
    })
}

/// Rigged data at one point.
#[derive(Clone, Debug)]
pub struct RiggedStructure {
    pub u: Vec<f64>,
    pub point: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
    pub gbar: DMatrix<f64>,
    pub zeta: Vec<f64>,
    /// `α = ḡ(ζ, ·)` in ambient components.
    pub alpha: Vec<f64>,
    /// `ω = i*α` in parameter components.
    pub omega: Vec<f64>,
    pub induced: DMatrix<f64>,
    pub gtilde: DMatrix<f64>,
    pub xi_param: Vec<f64>,
    pub xi: Vec<f64>,
    pub transversal: Vec<f64>,
    /// g̃-orthonormal basis of the screen `ker ω`, parameter components.
    pub screen_basis: Vec<Vec<f64>>,
    /// `P = I − ξ ⊗ ω`, projecting onto the screen along ξ.
    pub projector: DMatrix<f64>,
}

impl RiggedStructure {
    pub fn param_dim(&self) -> usize {
        self.omega.len()
    }

    pub fn push(&self, v: &[f64]) -> Vec<f64> {
        crate::hypersurface::push_forward(&self.basis, v)
    }

    pub fn gbar_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        inner(&self.gbar, x, y)
    }

    pub fn gtilde_inner(&self, x: &[f64], y: &[f64]) -> f64 {
        inner(&self.gtilde, x, y)
    }

    pub fn omega_of(&self, v: &[f64]) -> f64 {
        self.omega.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// Named residuals of every structural invariant.
    pub fn invariant_residuals(&self) -> Vec<(&'static str, f64)> {
        let m = self.param_dim();
        let xi = &self.xi;
        let nv = &self.transversal;
        let mut out = vec![
            ("zeta_xi_normalization", (self.gbar_inner(&self.zeta, xi) - 1.0).abs()),
            ("xi_null", self.gbar_inner(xi, xi).abs()),
            ("xi_unit_gtilde", (self.gtilde_inner(&self.xi_param, &self.xi_param) - 1.0).abs()),
            ("n_xi_pairing", (self.gbar_inner(nv, xi) - 1.0).abs()),
            ("n_null", self.gbar_inner(nv, nv).abs()),
        ];
        let mut omega_dual = 0.0f64;
        let mut proj = 0.0f64;
        for i in 0..m {
            let mut ei = vec![0.0; m];
            ei[i] = 1.0;
            omega_dual = omega_dual
                .max((self.omega[i] - self.gtilde_inner(&self.xi_param, &ei)).abs());
            let pe: Vec<f64> = self.projector.column(i).iter().copied().collect();
            proj = proj.max(self.omega_of(&pe).abs());
        }
        out.push(("omega_is_gtilde_xi", omega_dual));
        out.push(("omega_kills_projector", proj));
        let mut n_screen = 0.0f64;
        let mut ortho = 0.0f64;
        for (a, s) in self.screen_basis.iter().enumerate() {
            n_screen = n_screen.max(self.gbar_inner(nv, &self.push(s)).abs());
            ortho = ortho.max(self.omega_of(s).abs());
            for (b, t) in self.screen_basis.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                ortho = ortho.max((self.gtilde_inner(s, t) - want).abs());
            }
        }
        out.push(("n_screen_orthogonal", n_screen));
        out.push(("screen_orthonormal", ortho));
        let min_eig = self.gtilde.clone().symmetric_eigenvalues().min();
        out.push(("gtilde_positive", if min_eig > 0.0 { 0.0 } else { -min_eig }));
        out
    }
}

/// Gram–Schmidt in `g̃` over the projected coordinate frame, choosing at each
/// step the remaining candidate of largest norm.
fn screen_basis(gtilde: &DMatrix<f64>, projector: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let m = gtilde.nrows();
    let mut cands: Vec<DVector<f64>> = (0..m).map(|i| projector.column(i).into_owned()).collect();
    let mut out: Vec<DVector<f64>> = Vec::new();
    for _ in 0..m.saturating_sub(1) {
        let (best, norm2) = cands
            .iter()
            .enumerate()
            .map(|(k, v)| (k, (v.transpose() * gtilde * v)[(0, 0)]))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let v = cands.swap_remove(best) / norm2.sqrt();
        for c in cands.iter_mut() {
            let p = (v.transpose() * gtilde * &*c)[(0, 0)];
            *c -= &v * p;
        }
        out.push(v);
    }
    out.into_iter().map(|v| v.iter().copied().collect()).collect()
}

/// Transversality requirement `|ḡ(ζ, rad)| > 1e-8·|ζ|·|rad|`.
pub const TRANSVERSALITY: f64 = 1e-8;

pub fn rigged_structure_at(imm: &Immersion, rig: &RiggingField, u: &[f64]) -> Result<RiggedStructure> {
    let frame = frame_at(imm, u)?;
    let rad = crate::hypersurface::radical_at(imm, u)?;
    let g = metric_at(imm.chart.as_ref(), &frame.point)?;
    let zeta = rig.at(&frame.point);
    let pairing = inner(&g, &zeta, &rad);
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if pairing.abs() <= TRANSVERSALITY * norm(&zeta) * norm(&rad) {
        return Err(Error::RiggingTangent {
            point: u.to_vec(),
            pairing: pairing.abs(),
        });
    }
    let loc = local_rigging(imm, rig, u, 0)?;
    let m = imm.param_dim();
    let gtilde = loc.gtilde_value();
    let induced = jets_to_matrix(&loc.induced, m, Jet::value);
    let omega = values(&loc.omega);
    let xi_param = values(&loc.xi_param);
    let projector = DMatrix::from_fn(m, m, |i, j| {
        (if i == j { 1.0 } else { 0.0 }) - xi_param[i] * omega[j]
    });
    let screen_basis = screen_basis(&gtilde, &projector);
    Ok(RiggedStructure {
        u: u.to_vec(),
        point: frame.point,
        basis: frame.basis,
        gbar: g,
        zeta,
        alpha: values(&loc.alpha),
        omega,
        induced,
        gtilde,
        xi_param,
        xi: values(&loc.xi),
        transversal: values(&loc.transversal),
        screen_basis,
        projector,
    })
}

/// `dα_{ab} = ∂_a α_b − ∂_b α_a` at an ambient point.
pub fn d_alpha_at(chart: &MetricChart, rig: &RiggingField, x: &[f64]) -> Result<DMatrix<f64>> {
    chart.check_domain(x)?;
    let n = chart.dim();
    let xs = Jet::variables(x, 1);
    let g = chart.eval(&xs);
    let z = rig.eval(&xs);
    let alpha: Vec<Jet> = (0..n)
        .map(|a| (0..n).map(|b| &g[a * n + b] * &z[b]).sum())
        .collect();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        alpha[b].partial(&[a]) - alpha[a].partial(&[b])
    }))
}

/// `L_ζ ḡ` at an ambient point.
pub fn lie_derivative_metric(chart: &MetricChart, rig: &RiggingField, x: &[f64]) -> Result<DMatrix<f64>> {
    chart.check_domain(x)?;
    let n = chart.dim();
    let xs = Jet::variables(x, 1);
    let g = chart.eval(&xs);
    let z = rig.eval(&xs);
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let mut s = 0.0;
        for c in 0..n {
            s += z[c].value() * g[a * n + b].partial(&[c])
                + g[c * n + b].value() * z[c].partial(&[a])
                + g[a * n + c].value() * z[c].partial(&[b]);
        }
        s
    }))
}

/// Riemannian metric `ğ = ḡ + α ⊗ α` on the ambient chart.
pub fn riemannian_ambient_metric(chart: &MetricChart, rig: &RiggingField, x: &[f64]) -> Result<DMatrix<f64>> {
    let g = metric_at(chart, x)?;
    let z = DVector::from_vec(rig.at(x));
    let alpha = &g * z;
    Ok(g + &alpha * alpha.transpose())
}

#[derive(Clone, Debug)]
pub struct ClosednessReport {
    pub samples: usize,
    pub max_residual: f64,
    pub argmax: usize,
    pub tolerance: f64,
    pub is_closed: bool,
    pub failures: Vec<(usize, String)>,
}

pub fn closedness_scan(chart: &MetricChart, rig: &RiggingField, points: &[Vec<f64>], tolerance: f64) -> ClosednessReport {
    let mut max_residual = 0.0f64;
    let mut argmax = 0;
    let mut failures = Vec::new();
    for (k, p) in points.iter().enumerate() {
        match d_alpha_at(chart, rig, p) {
            Ok(d) => {
                let r = d.amax();
                if r > max_residual {
                    max_residual = r;
                    argmax = k;
                }
            }
            Err(e) => failures.push((k, e.to_string())),
        }
    }
    ClosednessReport {
        samples: points.len(),
        max_residual,
        argmax,
        tolerance,
        is_closed: failures.is_empty() && max_residual < tolerance,
        failures,
    }
}

#[derive(Clone, Debug)]
pub struct ConformalityReport {
    pub samples: usize,
    /// Least-squares factor `ρ` in `L_ζ ḡ ≈ 2ρḡ`, per sample.
    pub conformal_rho: Vec<f64>,
    pub max_residual: f64,
    pub argmax: usize,
    pub tolerance: f64,
    pub is_conformal: bool,
    pub failures: Vec<(usize, String)>,
}

/// Least-squares conformal factor and residual at one point.
pub fn conformal_factor_at(chart: &MetricChart, rig: &RiggingField, x: &[f64]) -> Result<(f64, f64)> {
    let l = lie_derivative_metric(chart, rig, x)?;
    let g = metric_at(chart, x)?;
    let rho = l.dot(&g) / (2.0 * g.dot(&g));
    Ok((rho, (l - g * (2.0 * rho)).amax()))
}

pub fn conformality_scan(chart: &MetricChart, rig: &RiggingField, points: &[Vec<f64>], tolerance: f64) -> ConformalityReport {
    let mut rhos = Vec::with_capacity(points.len());
    let mut max_residual = 0.0f64;
    let mut argmax = 0;
    let mut failures = Vec::new();
    for (k, p) in points.iter().enumerate() {
        match conformal_factor_at(chart, rig, p) {
            Ok((rho, r)) => {
                rhos.push(rho);
                if r > max_residual {
                    max_residual = r;
                    argmax = k;
                }
            }
            Err(e) => {
                rhos.push(f64::NAN);
                failures.push((k, e.to_string()));
            }
        }
    }
    ConformalityReport {
        samples: points.len(),
        conformal_rho: rhos,
        max_residual,
        argmax,
        tolerance,
        is_conformal: failures.is_empty() && max_residual < tolerance,
        failures,
    }
}

/// Causal character of a gradient rigging at the probe points.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientFlags {
    /// `ḡ(∇f, ∇f)` per probe.
    pub norms: Vec<f64>,
    pub timelike: bool,
}

/// `ζ = ∇̄f = ḡ^{-1} df`, with `f` kept as the rigging's potential.
///
/// Errors when the gradient vanishes at a probe point.
pub fn gradient_rigging(
    chart: Arc<MetricChart>,
    label: impl Into<String>,
    f: JetScalar,
    probes: &[Vec<f64>],
) -> Result<(RiggingField, GradientFlags)> {
    let c = chart.clone();
    let pot = f.clone();
    let field: JetMap = Arc::new(move |x: &[Jet]| gradient_jets(&c, &pot, x));
    let rig = RiggingField::new(label, field).with_potential(f);
    let mut norms = Vec::with_capacity(probes.len());
    for p in probes {
        let g = metric_at(chart.as_ref(), p)?;
        let v = rig.at(p);
        let scale = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let gnorm = g.amax().max(f64::MIN_POSITIVE);
        if scale <= 1e-14 * gnorm {
            return Err(Error::VanishingGradient { point: p.clone() });
        }
        norms.push(inner(&g, &v, &v));
    }
    let timelike = norms.iter().all(|&q| q < 0.0);
    Ok((rig, GradientFlags { norms, timelike }))
}

/// Expand `ḡ^{-1} df` around the values of `x` and substitute `x` back in.
fn gradient_jets(chart: &MetricChart, f: &JetScalar, x: &[Jet]) -> Vec<Jet> {
    let n = x.len();
    let order = x.iter().map(Jet::order).max().unwrap_or(0);
    let x0 = values(x);
    let vars = Jet::variables(&x0, order + 1);
    let fj = f(&vars);
    let df: Vec<Jet> = (0..n).map(|a| fj.derivative(a)).collect();
    let g: Vec<Jet> = chart.eval(&vars).iter().map(|c| c.truncate(order)).collect();
    let grad = jet::solve(&g, &df).unwrap_or_else(|| vec![Jet::constant(f64::NAN); n]);
    if order == 0 || x.iter().all(Jet::is_scalar) {
        return grad.iter().map(|c| Jet::constant_like(c.value(), &x[0])).collect();
    }
    grad.iter().map(|c| c.compose(x)).collect()
}
