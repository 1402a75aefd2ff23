use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;

/// Vector-valued function evaluated in jet arithmetic.
pub type JetMap = Arc<dyn Fn(&[Jet]) -> Vec<Jet> + Send + Sync>;

/// Scalar function evaluated in jet arithmetic.
pub type JetScalar = Arc<dyn Fn(&[Jet]) -> Jet + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    /// One negative eigenvalue: (−,+,…,+).
    Lorentzian,
    Riemannian,
}

impl Signature {
    pub fn negative_count(self) -> usize {
        match self {
            Signature::Lorentzian => 1,
            Signature::Riemannian => 0,
        }
    }
}

/// One coordinate axis of a chart domain. Finite bounds are open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub periodic: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Interval {
        Interval {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn unbounded() -> Interval {
        Interval::new(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn periodic(lo: f64, hi: f64) -> Interval {
        Interval {
            lo,
            hi,
            periodic: true,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && (self.periodic || (x > self.lo && x < self.hi))
    }

    pub fn period(&self) -> Option<f64> {
        self.periodic.then_some(self.hi - self.lo)
    }

    pub fn wrap(&self, x: f64) -> f64 {
        match self.period() {
            Some(p) => self.lo + (x - self.lo).rem_euclid(p),
            None => x,
        }
    }

    /// Signed difference `a − b`, reduced to the shortest representative on periodic axes.
    pub fn difference(&self, a: f64, b: f64) -> f64 {
        match self.period() {
            Some(p) => {
                let d = (a - b).rem_euclid(p);
                if d > p / 2.0 {
                    d - p
                } else {
                    d
                }
            }
            None => a - b,
        }
    }
}

/// Axis-aligned coordinate box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    pub axes: Vec<Interval>,
}

impl DomainBox {
    pub fn new(axes: Vec<Interval>) -> DomainBox {
        DomainBox { axes }
    }

    pub fn unbounded(dim: usize) -> DomainBox {
        DomainBox::new(vec![Interval::unbounded(); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.axes.len() && self.axes.iter().zip(p).all(|(a, &x)| a.contains(x))
    }

    pub fn wrap(&self, p: &mut [f64]) {
        for (a, x) in self.axes.iter().zip(p.iter_mut()) {
            *x = a.wrap(*x);
        }
    }

    /// Which face `p` violates, if any: `(axis, upper?)`.
    pub fn violated_face(&self, p: &[f64]) -> Option<(usize, bool)> {
        self.axes.iter().zip(p).enumerate().find_map(|(i, (a, &x))| {
            if a.periodic {
                None
            } else if x <= a.lo {
                Some((i, false))
            } else if x >= a.hi {
                Some((i, true))
            } else {
                None
            }
        })
    }
}

/// A metric tensor field on a coordinate chart.
pub trait ChartMetric: Send + Sync {
    fn name(&self) -> &str;
    fn dim(&self) -> usize;
    fn domain(&self) -> &DomainBox;
    fn signature(&self) -> Signature;
    /// Metric components, row-major, as jets of `order` seeded at `p`.
    fn metric_jet(&self, p: &[f64], order: usize) -> Result<Vec<Jet>>;
}

/// A metric given by a jet-evaluable closure on a coordinate box.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    coords: Vec<String>,
    domain: DomainBox,
    signature: Signature,
    metric: JetMap,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("coords", &self.coords)
            .field("signature", &self.signature)
            .finish()
    }
}

impl MetricChart {
    pub fn new(
        name: impl Into<String>,
        coords: Vec<String>,
        domain: DomainBox,
        signature: Signature,
        metric: JetMap,
    ) -> MetricChart {
        assert_eq!(coords.len(), domain.dim());
        MetricChart {
            name: name.into(),
            coords,
            domain,
            signature,
            metric,
        }
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    /// Evaluate the metric on arbitrary jets (e.g. a point moving with some
    /// other parameters). No domain check.
    pub fn eval(&self, x: &[Jet]) -> Vec<Jet> {
        (self.metric)(x)
    }

    pub fn check_domain(&self, p: &[f64]) -> Result<()> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                chart: self.name.clone(),
                point: p.to_vec(),
            })
        }
    }
}

impl ChartMetric for MetricChart {
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn signature(&self) -> Signature {
        self.signature
    }

    fn metric_jet(&self, p: &[f64], order: usize) -> Result<Vec<Jet>> {
        self.check_domain(p)?;
        Ok(self.eval(&Jet::variables(p, order)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_difference_is_shortest() {
        let a = Interval::periodic(0.0, std::f64::consts::TAU);
        assert!((a.difference(0.1, 6.2) - (0.1 + std::f64::consts::TAU - 6.2)).abs() < 1e-12);
        assert!((a.wrap(-0.5) - (std::f64::consts::TAU - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn open_bounds_exclude_faces() {
        let b = DomainBox::new(vec![Interval::new(0.0, f64::INFINITY), Interval::unbounded()]);
        assert!(!b.contains(&[0.0, 1.0]));
        assert!(b.contains(&[1e-9, -1e9]));
        assert_eq!(b.violated_face(&[-1.0, 0.0]), Some((0, false)));
    }
}
