//! Minkowski, generalized Robertson–Walker and Robertson–Walker charts.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::warp::{Warp, WarpSpec};
use crate::error::{Error, Result};
use crate::geometry::{DomainBox, Interval, JetMap, MetricChart, Signature};
use crate::jet::Jet;

/// Riemannian fiber `(L, g₀)` of a warped product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FiberSpec {
    Flat { dim: usize },
    /// Round sphere of curvature `c > 0` in hyperspherical coordinates.
    Sphere { c: f64, dim: usize },
    /// Hyperbolic space of curvature `c < 0` in geodesic polar coordinates.
    Hyperbolic { c: f64, dim: usize },
}

impl FiberSpec {
    pub fn dim(&self) -> usize {
        match self {
            FiberSpec::Flat { dim } | FiberSpec::Sphere { dim, .. } | FiberSpec::Hyperbolic { dim, .. } => *dim,
        }
    }

    pub fn curvature(&self) -> f64 {
        match self {
            FiberSpec::Flat { .. } => 0.0,
            FiberSpec::Sphere { c, .. } | FiberSpec::Hyperbolic { c, .. } => *c,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            FiberSpec::Flat { dim } if dim >= 1 => Ok(()),
            FiberSpec::Sphere { c, dim } if c > 0.0 && dim >= 1 => Ok(()),
            FiberSpec::Hyperbolic { c, dim } if c < 0.0 && dim >= 1 => Ok(()),
            _ => Err(Error::InvalidSpec(format!("invalid fiber {self:?}"))),
        }
    }

    pub fn coords(&self) -> Vec<String> {
        let k = self.dim();
        match self {
            FiberSpec::Flat { .. } => {
                if k <= 3 {
                    ["x", "y", "z"][..k].iter().map(|s| s.to_string()).collect()
                } else {
                    (1..=k).map(|i| format!("x{i}")).collect()
                }
            }
            FiberSpec::Sphere { .. } => {
                let mut v: Vec<String> = (1..k).map(|i| format!("theta{i}")).collect();
                v.push("phi".into());
                v
            }
            FiberSpec::Hyperbolic { .. } => {
                let mut v = vec!["rho".to_string()];
                if k >= 2 {
                    v.extend((1..k - 1).map(|i| format!("theta{i}")));
                    v.push("phi".into());
                }
                v
            }
        }
    }

    pub fn domain(&self) -> Vec<Interval> {
        let k = self.dim();
        match self {
            FiberSpec::Flat { .. } => vec![Interval::unbounded(); k],
            FiberSpec::Sphere { .. } => {
                let mut v = vec![Interval::new(0.0, PI); k - 1];
                v.push(Interval::periodic(0.0, TAU));
                v
            }
            FiberSpec::Hyperbolic { .. } => {
                if k == 1 {
                    return vec![Interval::unbounded()];
                }
                let mut v = vec![Interval::new(0.0, f64::INFINITY)];
                v.extend(vec![Interval::new(0.0, PI); k - 2]);
                v.push(Interval::periodic(0.0, TAU));
                v
            }
        }
    }

    /// Diagonal of `g₀` at fiber coordinates `x`.
    pub fn diagonal(&self, x: &[Jet]) -> Vec<Jet> {
        let k = self.dim();
        match *self {
            FiberSpec::Flat { .. } => vec![Jet::constant(1.0); k],
            FiberSpec::Sphere { c, .. } => unit_sphere_diagonal(x)
                .into_iter()
                .map(|d| d * (1.0 / c))
                .collect(),
            FiberSpec::Hyperbolic { c, .. } => {
                if k == 1 {
                    return vec![Jet::constant(1.0)];
                }
                let a = (-c).sqrt();
                let s = (&x[0] * a).sinh() / a;
                let s2 = &s * &s;
                let mut out = vec![Jet::constant(1.0)];
                out.extend(unit_sphere_diagonal(&x[1..]).into_iter().map(|d| d * &s2));
                out
            }
        }
    }
}

/// `dθ₁² + sin²θ₁ dθ₂² + … + (Π sin²θᵢ) dφ²`.
fn unit_sphere_diagonal(x: &[Jet]) -> Vec<Jet> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = Jet::constant(1.0);
    for (i, xi) in x.iter().enumerate() {
        out.push(acc.clone());
        if i + 1 < x.len() {
            let s = xi.sin();
            acc = &acc * &(&s * &s);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpacetimeSpec {
    Minkowski { dim: usize },
    Grw { warp: WarpSpec, fiber: FiberSpec },
    /// Four-dimensional warped product over a space form of curvature `c`.
    RobertsonWalker { c: f64, warp: WarpSpec },
}

/// A catalog spacetime: its chart plus the warped-product data, if any.
#[derive(Clone, Debug)]
pub struct Spacetime {
    pub spec: SpacetimeSpec,
    pub chart: Arc<MetricChart>,
    pub warp: Option<Warp>,
    pub fiber: FiberSpec,
}

impl Spacetime {
    pub fn dim(&self) -> usize {
        self.fiber.dim() + 1
    }

    /// Warp, with Minkowski read as `f ≡ 1` over a flat fiber.
    pub fn warp_or_one(&self) -> Warp {
        self.warp
            .clone()
            .unwrap_or_else(|| Warp::new(WarpSpec::One).expect("constant warp"))
    }
}

pub fn make_spacetime(spec: &SpacetimeSpec) -> Result<Spacetime> {
    match spec {
        SpacetimeSpec::Minkowski { dim } => {
            if *dim < 2 {
                return Err(Error::InvalidSpec("minkowski needs dim >= 2".into()));
            }
            let n = *dim;
            let metric: JetMap = Arc::new(move |_x: &[Jet]| {
                let mut g = vec![Jet::constant(0.0); n * n];
                g[0] = Jet::constant(-1.0);
                for i in 1..n {
                    g[i * n + i] = Jet::constant(1.0);
                }
                g
            });
            let fiber = FiberSpec::Flat { dim: n - 1 };
            let mut coords = vec!["t".to_string()];
            coords.extend(fiber.coords());
            let chart = MetricChart::new(
                format!("minkowski{n}"),
                coords,
                DomainBox::unbounded(n),
                Signature::Lorentzian,
                metric,
            );
            Ok(Spacetime {
                spec: spec.clone(),
                chart: Arc::new(chart),
                warp: None,
                fiber,
            })
        }
        SpacetimeSpec::Grw { warp, fiber } => warped(spec.clone(), warp, fiber.clone(), "grw"),
        SpacetimeSpec::RobertsonWalker { c, warp } => {
            let fiber = if *c == 0.0 {
                FiberSpec::Flat { dim: 3 }
            } else if *c > 0.0 {
                FiberSpec::Sphere { c: *c, dim: 3 }
            } else {
                FiberSpec::Hyperbolic { c: *c, dim: 3 }
            };
            warped(spec.clone(), warp, fiber, "rw")
        }
    }
}

fn warped(spec: SpacetimeSpec, warp: &WarpSpec, fiber: FiberSpec, prefix: &str) -> Result<Spacetime> {
    fiber.validate()?;
    let w = Warp::new(warp.clone())?;
    let k = fiber.dim();
    let n = k + 1;
    let wf = w.clone();
    let fb = fiber.clone();
    let metric: JetMap = Arc::new(move |x: &[Jet]| {
        let f = wf.eval(&x[0]);
        let f2 = &f * &f;
        let diag = fb.diagonal(&x[1..]);
        let mut g = vec![Jet::constant(0.0); n * n];
        g[0] = Jet::constant(-1.0);
        for (i, d) in diag.iter().enumerate() {
            g[(i + 1) * n + i + 1] = &f2 * d;
        }
        g
    });
    let mut coords = vec!["t".to_string()];
    coords.extend(fiber.coords());
    let mut axes = vec![w.interval];
    axes.extend(fiber.domain());
    let chart = MetricChart::new(
        format!("{prefix}{n}"),
        coords,
        DomainBox::new(axes),
        Signature::Lorentzian,
        metric,
    );
    Ok(Spacetime {
        spec,
        chart: Arc::new(chart),
        warp: Some(w),
        fiber,
    })
}

/// Round 2-sphere of the given radius in `(θ, φ)`, a Riemannian test chart.
pub fn round_sphere(radius: f64) -> MetricChart {
    let r2 = radius * radius;
    let metric: JetMap = Arc::new(move |x: &[Jet]| {
        let s = x[0].sin();
        vec![
            Jet::constant(r2),
            Jet::constant(0.0),
            Jet::constant(0.0),
            &s * &s * r2,
        ]
    });
    MetricChart::new(
        "round_sphere",
        vec!["theta".into(), "phi".into()],
        DomainBox::new(vec![Interval::new(0.0, PI), Interval::periodic(0.0, TAU)]),
        Signature::Riemannian,
        metric,
    )
}

/// Euclidean metric on an arbitrary box, a Riemannian test chart.
pub fn flat_chart(domain: DomainBox) -> MetricChart {
    let n = domain.dim();
    let metric: JetMap = Arc::new(move |_x: &[Jet]| {
        let mut g = vec![Jet::constant(0.0); n * n];
        for i in 0..n {
            g[i * n + i] = Jet::constant(1.0);
        }
        g
    });
    let coords = (1..=n).map(|i| format!("x{i}")).collect();
    MetricChart::new("flat", coords, domain, Signature::Riemannian, metric)
}
