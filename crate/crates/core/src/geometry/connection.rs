//! Levi-Civita connection and curvature from exact metric jets.
//!
//! Index convention: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`, stored as
//! `R^a_{bcd}` with `R(∂_c, ∂_d)∂_b = R^a_{bcd} ∂_a`. Ricci is `R_{bd} = R^a_{bad}`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::chart::{ChartMetric, JetMap, MetricChart, Signature};
use crate::error::{Error, Result};
use crate::jet::Jet;

/// Metric value and its first two coordinate derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricDerivs {
    pub dim: usize,
    pub g: DMatrix<f64>,
    pub ginv: DMatrix<f64>,
    /// `dg[e][(a,b)] = ∂_e g_ab`
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[e][f][(a,b)] = ∂_e ∂_f g_ab` (empty when only first order was requested)
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

pub(crate) fn jets_to_matrix(m: &[Jet], n: usize, f: impl Fn(&Jet) -> f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |a, b| f(&m[a * n + b]))
}

/// Symmetry, degeneracy and signature checks shared by every metric evaluation.
pub fn validate_metric(g: &DMatrix<f64>, signature: Signature, p: &[f64]) -> Result<()> {
    let n = g.nrows();
    let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let defect = (g - g.transpose()).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if defect > 1e-12 * scale {
        return Err(Error::AsymmetricMetric {
            point: p.to_vec(),
            defect,
        });
    }
    let row_norm = g
        .row_iter()
        .map(|r| r.norm())
        .fold(0.0f64, f64::max);
    let threshold = 1e-10 * row_norm.powi(n as i32);
    let det = g.determinant();
    if det.abs() <= threshold {
        return Err(Error::DegenerateMetric {
            point: p.to_vec(),
            det,
            threshold,
        });
    }
    let eig = SymmetricEigen::new(g.clone());
    let negative = eig.eigenvalues.iter().filter(|&&l| l < 0.0).count();
    if negative != signature.negative_count() {
        return Err(Error::SignatureMismatch {
            point: p.to_vec(),
            expected: signature.negative_count(),
            found: negative,
        });
    }
    Ok(())
}

/// Validated metric matrix at `p`.
pub fn metric_at(chart: &dyn ChartMetric, p: &[f64]) -> Result<DMatrix<f64>> {
    let jets = chart.metric_jet(p, 0)?;
    let g = jets_to_matrix(&jets, chart.dim(), Jet::value);
    validate_metric(&g, chart.signature(), p)?;
    Ok(g)
}

impl MetricDerivs {
    pub fn at(chart: &dyn ChartMetric, p: &[f64], order: usize) -> Result<MetricDerivs> {
        let jets = chart.metric_jet(p, order)?;
        MetricDerivs::from_jets(&jets, chart.dim(), chart.signature(), p, order)
    }

    /// From row-major metric jets seeded at `p`; derivatives up to `order` (at most 2).
    pub fn from_jets(
        jets: &[Jet],
        n: usize,
        signature: Signature,
        p: &[f64],
        order: usize,
    ) -> Result<MetricDerivs> {
        let g = jets_to_matrix(jets, n, Jet::value);
        validate_metric(&g, signature, p)?;
        let ginv = g.clone().try_inverse().ok_or_else(|| Error::DegenerateMetric {
            point: p.to_vec(),
            det: 0.0,
            threshold: 0.0,
        })?;
        let dg = if order >= 1 {
            (0..n)
                .map(|e| jets_to_matrix(jets, n, |j| j.partial(&[e])))
                .collect()
        } else {
            Vec::new()
        };
        let ddg = if order >= 2 {
            (0..n)
                .map(|e| {
                    (0..n)
                        .map(|f| jets_to_matrix(jets, n, |j| j.partial(&[e, f])))
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        Ok(MetricDerivs {
            dim: n,
            g,
            ginv,
            dg,
            ddg,
        })
    }

    /// Christoffel symbols of the first kind `Γ_{dbc}`.
    fn first_kind(&self) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n * n * n];
        for d in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out[(d * n + b) * n + c] = 0.5
                        * (self.dg[b][(d, c)] + self.dg[c][(d, b)] - self.dg[d][(b, c)]);
                }
            }
        }
        out
    }

    pub fn christoffel(&self) -> Christoffel {
        let n = self.dim;
        let first = self.first_kind();
        let mut data = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in b..n {
                    let v: f64 = (0..n)
                        .map(|d| self.ginv[(a, d)] * first[(d * n + b) * n + c])
                        .sum();
                    data[(a * n + b) * n + c] = v;
                    data[(a * n + c) * n + b] = v;
                }
            }
        }
        Christoffel { dim: n, data }
    }

    /// `∂_e Γ^a_{bc}`, indexed `[e][(a*n+b)*n+c]`. Needs second derivatives.
    pub fn christoffel_derivatives(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        let first = self.first_kind();
        (0..n)
            .map(|e| {
                let dginv = -(&self.ginv * &self.dg[e] * &self.ginv);
                let mut out = vec![0.0; n * n * n];
                for a in 0..n {
                    for b in 0..n {
                        for c in 0..n {
                            let mut v = 0.0;
                            for d in 0..n {
                                let dfirst = 0.5
                                    * (self.ddg[e][b][(d, c)] + self.ddg[e][c][(d, b)]
                                        - self.ddg[e][d][(b, c)]);
                                v += dginv[(a, d)] * first[(d * n + b) * n + c]
                                    + self.ginv[(a, d)] * dfirst;
                            }
                            out[(a * n + b) * n + c] = v;
                        }
                    }
                }
                out
            })
            .collect()
    }
}

/// Connection coefficients `Γ^a_{bc}` (`∇_{∂_b}∂_c = Γ^a_{bc} ∂_a`).
#[derive(Clone, Debug)]
pub struct Christoffel {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Christoffel {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[(a * self.dim + b) * self.dim + c]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.data[(a * self.dim + b) * self.dim + c] = v;
    }

    /// `Γ(X, Y)^a = Γ^a_{bc} X^b Y^c`.
    pub fn contract(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|a| {
                let mut s = 0.0;
                for b in 0..n {
                    if x[b] == 0.0 {
                        continue;
                    }
                    for c in 0..n {
                        s += self.get(a, b, c) * x[b] * y[c];
                    }
                }
                s
            })
            .collect()
    }

    /// Largest `|Γ^a_{bc} − Γ^a_{cb}|`.
    pub fn torsion_residual(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    m = m.max((self.get(a, b, c) - self.get(a, c, b)).abs());
                }
            }
        }
        m
    }
}

pub fn christoffel(chart: &dyn ChartMetric, p: &[f64]) -> Result<Christoffel> {
    Ok(MetricDerivs::at(chart, p, 1)?.christoffel())
}

/// Riemann tensor of an arbitrary affine connection from its coefficients and
/// their coordinate derivatives (`dgamma[e]` laid out like `Christoffel::data`).
pub fn riemann_from_connection(gamma: &Christoffel, dgamma: &[Vec<f64>]) -> Vec<f64> {
    let n = gamma.dim;
    let idx3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut r = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    // ∇_c ∇_d ∂_b − ∇_d ∇_c ∂_b with ∇_d ∂_b = Γ^e_{db} ∂_e
                    let mut v = dgamma[c][idx3(a, d, b)] - dgamma[d][idx3(a, c, b)];
                    for e in 0..n {
                        v += gamma.get(a, c, e) * gamma.get(e, d, b)
                            - gamma.get(a, d, e) * gamma.get(e, c, b);
                    }
                    r[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    r
}

/// Connection and curvature at one point.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    pub dim: usize,
    pub metric: DMatrix<f64>,
    pub christoffel: Christoffel,
    /// `R^a_{bcd}` flattened as `((a*n+b)*n+c)*n+d`.
    pub riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
}

impl CurvatureData {
    pub fn from_derivs(d: &MetricDerivs) -> CurvatureData {
        let christoffel = d.christoffel();
        let riemann = riemann_from_connection(&christoffel, &d.christoffel_derivatives());
        let n = d.dim;
        let ricci = DMatrix::from_fn(n, n, |b, dd| {
            (0..n).map(|a| riemann[((a * n + b) * n + a) * n + dd]).sum()
        });
        CurvatureData {
            dim: n,
            metric: d.g.clone(),
            christoffel,
            riemann,
            ricci,
        }
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.riemann[((a * n + b) * n + c) * n + d]
    }

    /// `R(X,Y)Z`.
    pub fn apply(&self, x: &[f64], y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|a| {
                let mut s = 0.0;
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            s += self.riemann(a, b, c, d) * z[b] * x[c] * y[d];
                        }
                    }
                }
                s
            })
            .collect()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += self.metric[(a, b)] * x[a] * y[b];
            }
        }
        s
    }

    /// `g(R(X,Y)Y, X) / (g(X,X)g(Y,Y) − g(X,Y)²)`.
    pub fn sectional(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let q = self.inner(x, x) * self.inner(y, y) - self.inner(x, y).powi(2);
        let scale = self.inner(x, x).abs() * self.inner(y, y).abs();
        if q.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateSpan);
        }
        Ok(self.inner(&self.apply(x, y, y), x) / q)
    }

    pub fn ricci_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for a in 0..n {
            for b in 0..n {
                s += self.ricci[(a, b)] * x[a] * y[b];
            }
        }
        s
    }

    fn lowered(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        (0..self.dim)
            .map(|e| self.metric[(a, e)] * self.riemann(e, b, c, d))
            .sum()
    }

    /// Largest violation of `R_{abcd} = −R_{abdc} = −R_{bacd}` and pair symmetry.
    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.lowered(a, b, c, d);
                        m = m
                            .max((r + self.lowered(a, b, d, c)).abs())
                            .max((r + self.lowered(b, a, c, d)).abs())
                            .max((r - self.lowered(c, d, a, b)).abs());
                    }
                }
            }
        }
        m
    }

    /// Largest `|R^a_{bcd} + R^a_{cdb} + R^a_{dbc}|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.dim;
        let mut m = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = self.riemann(a, b, c, d)
                            + self.riemann(a, c, d, b)
                            + self.riemann(a, d, b, c);
                        m = m.max(s.abs());
                    }
                }
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.riemann.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

pub fn curvature_at(chart: &dyn ChartMetric, p: &[f64]) -> Result<CurvatureData> {
    Ok(CurvatureData::from_derivs(&MetricDerivs::at(chart, p, 2)?))
}

/// Largest component of `∂_c g_ab − Γ^d_{ca} g_db − Γ^d_{cb} g_ad`.
pub fn compatibility_residual(chart: &dyn ChartMetric, p: &[f64]) -> Result<f64> {
    let d = MetricDerivs::at(chart, p, 1)?;
    let gamma = d.christoffel();
    let n = d.dim;
    let mut m = 0.0f64;
    for c in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut v = d.dg[c][(a, b)];
                for e in 0..n {
                    v -= gamma.get(e, c, a) * d.g[(e, b)] + gamma.get(e, c, b) * d.g[(a, e)];
                }
                m = m.max(v.abs());
            }
        }
    }
    Ok(m)
}

/// `∇̄_dir V` at `p` for a jet-evaluable vector field `V`.
pub fn ambient_derivative(
    chart: &MetricChart,
    field: &JetMap,
    p: &[f64],
    dir: &[f64],
) -> Result<Vec<f64>> {
    chart.check_domain(p)?;
    let gamma = christoffel(chart, p)?;
    let v = field(&Jet::variables(p, 1));
    let values: Vec<f64> = v.iter().map(Jet::value).collect();
    let corr = gamma.contract(dir, &values);
    Ok(v.iter()
        .zip(corr)
        .map(|(comp, c)| {
            let d: f64 = dir.iter().enumerate().map(|(e, de)| comp.partial(&[e]) * de).sum();
            d + c
        })
        .collect())
}
