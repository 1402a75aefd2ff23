//! Positive warping functions `f(t)` and primitives of `−f`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::CompiledExpr;
use crate::geometry::Interval;
use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum WarpSpec {
    /// `f ≡ 1`
    One,
    /// `f = e^t`
    Exp,
    /// `f = t² + 1`
    T2plus1,
    /// `f = cosh t`
    Cosh,
    /// User expression in the variable `t`, positive on `(lo, hi)`.
    Expr {
        expr: String,
        #[serde(default = "neg_inf")]
        lo: f64,
        #[serde(default = "pos_inf")]
        hi: f64,
    },
}

fn neg_inf() -> f64 {
    f64::NEG_INFINITY
}

fn pos_inf() -> f64 {
    f64::INFINITY
}

type UniFn = Arc<dyn Fn(&Jet) -> Jet + Send + Sync>;

#[derive(Clone)]
pub struct Warp {
    pub spec: WarpSpec,
    pub interval: Interval,
    f: UniFn,
    neg_primitive: Option<UniFn>,
}

impl fmt::Debug for Warp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Warp({:?})", self.spec)
    }
}

impl Warp {
    pub fn new(spec: WarpSpec) -> Result<Warp> {
        let all = Interval::unbounded();
        let (f, h, interval): (UniFn, Option<UniFn>, Interval) = match &spec {
            WarpSpec::One => (
                Arc::new(|t: &Jet| Jet::constant_like(1.0, t)),
                Some(Arc::new(|t: &Jet| -t.clone())),
                all,
            ),
            WarpSpec::Exp => (
                Arc::new(|t: &Jet| t.exp()),
                Some(Arc::new(|t: &Jet| -t.exp())),
                all,
            ),
            WarpSpec::T2plus1 => (
                Arc::new(|t: &Jet| t * t + 1.0),
                Some(Arc::new(|t: &Jet| -(t * t * t / 3.0 + t))),
                all,
            ),
            WarpSpec::Cosh => (
                Arc::new(|t: &Jet| t.cosh()),
                Some(Arc::new(|t: &Jet| -t.sinh())),
                all,
            ),
            WarpSpec::Expr { expr, lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::InvalidSpec(format!("empty warp interval ({lo}, {hi})")));
                }
                let e = CompiledExpr::new(expr, &["t"])?;
                (
                    Arc::new(move |t: &Jet| e.eval(std::slice::from_ref(t))),
                    None,
                    Interval::new(*lo, *hi),
                )
            }
        };
        let w = Warp {
            spec,
            interval,
            f,
            neg_primitive: h,
        };
        // positivity spot check
        for t in w.probe_times() {
            let v = w.value(t);
            if !(v > 0.0) {
                return Err(Error::InvalidSpec(format!("warp not positive at t = {t}: f = {v}")));
            }
        }
        Ok(w)
    }

    fn probe_times(&self) -> Vec<f64> {
        let lo = if self.interval.lo.is_finite() { self.interval.lo } else { -5.0 };
        let hi = if self.interval.hi.is_finite() { self.interval.hi } else { 5.0 };
        (1..16).map(|k| lo + (hi - lo) * k as f64 / 16.0).collect()
    }

    pub fn eval(&self, t: &Jet) -> Jet {
        (self.f)(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(&Jet::constant(t)).value()
    }

    /// `f^(k)(t)` for `k = 0..=order`.
    pub fn derivatives(&self, t: f64, order: usize) -> Vec<f64> {
        let j = self.eval(&Jet::variables(&[t], order).remove(0));
        (0..=order).map(|k| j.partial(&vec![0; k])).collect()
    }

    /// Point from which the numeric primitive is measured.
    pub fn reference_time(&self) -> f64 {
        let i = self.interval;
        match (i.lo.is_finite(), i.hi.is_finite()) {
            _ if i.contains(0.0) => 0.0,
            (true, true) => 0.5 * (i.lo + i.hi),
            (true, false) => i.lo + 1.0,
            (false, true) => i.hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// A primitive `h` of `−f`, i.e. `h′ = −f`.
    pub fn neg_primitive(&self, t: &Jet) -> Jet {
        if let Some(h) = &self.neg_primitive {
            return h(t);
        }
        let t0 = t.value();
        let h0 = -integrate(|s| self.value(s), self.reference_time(), t0);
        let k = t.order();
        let mut d = vec![h0];
        if k > 0 {
            d.extend(self.derivatives(t0, k - 1).into_iter().map(|v| -v));
        }
        t.compose_univariate(&d)
    }
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(&f, a, b, fa, fm, fb, whole, 1e-13 * (1.0 + whole.abs()), 40)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn expression_primitive_matches_closed_form() {
        let w = Warp::new(WarpSpec::Expr {
            expr: "t^2 + 1".into(),
            lo: -10.0,
            hi: 10.0,
        })
        .unwrap();
        let c = Warp::new(WarpSpec::T2plus1).unwrap();
        let t = Jet::variables(&[0.8], 3).remove(0);
        let a = w.neg_primitive(&t);
        let b = c.neg_primitive(&t);
        for k in 0..=3 {
            assert_relative_eq!(a.partial(&vec![0; k]), b.partial(&vec![0; k]), epsilon = 1e-11);
        }
        assert_relative_eq!(w.derivatives(0.8, 2)[1], 1.6, epsilon = 1e-14);
    }

    #[test]
    fn nonpositive_warp_rejected() {
        assert!(Warp::new(WarpSpec::Expr {
            expr: "t".into(),
            lo: -1.0,
            hi: 1.0
        })
        .is_err());
    }
}
