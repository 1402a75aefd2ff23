//! Null graphs `t = s(·)` in warped products with flat fiber: the profile
//! solves `s′ = f(s)` along a distance variable.

use serde::Serialize;

use super::warp::{Warp, WarpSpec};
use crate::error::{Error, Result};
use crate::jet::Jet;

const TAYLOR_ORDER: usize = 24;
const MAX_STEP: f64 = 0.5;
/// Profile values beyond this are treated as a blow-up.
const BLOWUP_VALUE: f64 = 1e6;

/// One Taylor patch `s(center + δ) = Σ c_j δ^j`, valid for `δ` between 0 and `span`.
#[derive(Clone, Debug)]
struct Patch {
    center: f64,
    span: f64,
    coeffs: Vec<f64>,
}

impl Patch {
    fn lo(&self) -> f64 {
        self.center.min(self.center + self.span)
    }

    fn hi(&self) -> f64 {
        self.center.max(self.center + self.span)
    }

    /// Derivatives of the patch polynomial at `center + d`.
    fn derivatives(&self, d: f64, order: usize) -> Vec<f64> {
        let mut c = self.coeffs.clone();
        let mut out = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            let v = c.iter().rev().fold(0.0, |acc, &a| acc * d + a);
            out.push(v * fact);
            fact *= (k + 1) as f64;
            // differentiate, scaled by 1/(k+1) so `fact` restores the factorial
            c = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, a)| a * j as f64 / (k + 1) as f64)
                .collect();
            if c.is_empty() {
                c.push(0.0);
            }
        }
        out
    }
}

/// Where the forward or backward integration stopped early.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlowUpInfo {
    pub at: f64,
    pub target: f64,
}

#[derive(Clone, Debug)]
pub struct EikonalProfile {
    pub warp: Warp,
    pub s0: f64,
    /// Open interval on which the profile is available.
    pub lo: f64,
    pub hi: f64,
    pub blowup_lo: Option<BlowUpInfo>,
    pub blowup_hi: Option<BlowUpInfo>,
    linear: bool,
    patches: Vec<Patch>,
}

/// Taylor coefficients of the solution through `(x, s)` by Picard iteration on jets.
fn taylor_step(warp: &Warp, s: f64) -> Vec<f64> {
    let k = TAYLOR_ORDER;
    let mut cur = vec![0.0; k + 1];
    cur[0] = s;
    for _ in 0..=k {
        let sj = Jet::from_coeffs(1, k, cur.clone());
        let fj = warp.eval(&sj);
        let fc: Vec<f64> = if fj.is_scalar() {
            let mut v = vec![0.0; k + 1];
            v[0] = fj.value();
            v
        } else {
            fj.coeffs().to_vec()
        };
        let mut next = vec![0.0; k + 1];
        next[0] = s;
        for j in 0..k {
            next[j + 1] = fc[j] / (j + 1) as f64;
        }
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn radius_estimate(c: &[f64]) -> f64 {
    let k = c.len() - 1;
    let mut r = f64::INFINITY;
    for (j, &cj) in c.iter().enumerate().skip(k / 2) {
        if cj != 0.0 && j > 0 {
            r = r.min(cj.abs().powf(-1.0 / j as f64));
        }
    }
    r
}

impl EikonalProfile {
    /// Integrate from `s(0) = s0` towards both ends of `(a, b)`, stopping early at blow-up.
    pub fn maximal(warp: &Warp, s0: f64, a: f64, b: f64) -> EikonalProfile {
        assert!(a <= 0.0 && 0.0 <= b && a < b, "interval must contain 0");
        if matches!(warp.spec, WarpSpec::One) {
            return EikonalProfile {
                warp: warp.clone(),
                s0,
                lo: a,
                hi: b,
                blowup_lo: None,
                blowup_hi: None,
                linear: true,
                patches: Vec::new(),
            };
        }
        let (fwd, hi, bhi) = Self::march(warp, s0, b);
        let (bwd, lo, blo) = Self::march(warp, s0, a);
        let mut patches: Vec<Patch> = bwd.into_iter().rev().collect();
        patches.extend(fwd);
        patches.sort_by(|p, q| p.lo().total_cmp(&q.lo()));
        EikonalProfile {
            warp: warp.clone(),
            s0,
            lo,
            hi,
            blowup_lo: blo,
            blowup_hi: bhi,
            linear: false,
            patches,
        }
    }

    fn march(warp: &Warp, s0: f64, target: f64) -> (Vec<Patch>, f64, Option<BlowUpInfo>) {
        let dir = if target >= 0.0 { 1.0 } else { -1.0 };
        let mut x = 0.0;
        let mut s = s0;
        let mut out = Vec::new();
        if target == 0.0 {
            return (out, 0.0, None);
        }
        loop {
            let remaining = (target - x).abs();
            if remaining <= 0.0 {
                return (out, target, None);
            }
            let coeffs = taylor_step(warp, s);
            let rho = radius_estimate(&coeffs);
            let h = (0.2 * rho).min(MAX_STEP).min(remaining);
            let blown = !s.is_finite() || s.abs() > BLOWUP_VALUE || !warp.interval.contains(s);
            if blown || h < 1e-10 * (1.0 + x.abs()) {
                return (out, x, Some(BlowUpInfo { at: x, target }));
            }
            let span = dir * h;
            let p = Patch {
                center: x,
                span,
                coeffs,
            };
            s = p.derivatives(span, 0)[0];
            x = if h == remaining { target } else { x + span };
            out.push(p);
        }
    }

    fn patch(&self, x: f64) -> &Patch {
        let idx = self.patches.partition_point(|p| p.hi() < x);
        &self.patches[idx.min(self.patches.len() - 1)]
    }

    /// `s^(k)(x)` for `k = 0..=order`.
    pub fn derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        if self.linear {
            let mut d = vec![x + self.s0, 1.0];
            d.resize(order + 1, 0.0);
            d.truncate(order + 1);
            return d;
        }
        let p = self.patch(x);
        p.derivatives(x - p.center, order)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.derivatives(x, 0)[0]
    }

    /// `s` composed with a jet argument.
    pub fn eval(&self, x: &Jet) -> Jet {
        x.compose_univariate(&self.derivatives(x.value(), x.order()))
    }

    /// `|s′(x)| − f(s(x))`.
    pub fn residual(&self, x: f64) -> f64 {
        let d = self.derivatives(x, 1);
        d[1].abs() - self.warp.value(d[0])
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Solve `s′ = f(s)`, `s(0) = s0` on `(a, b)`; errors if the solution leaves
/// the warp interval or blows up first.
pub fn eikonal_solve(warp: &Warp, s0: f64, a: f64, b: f64) -> Result<EikonalProfile> {
    if !(a <= 0.0 && 0.0 <= b && a < b) {
        return Err(Error::InvalidSpec(format!("eikonal interval ({a}, {b}) must contain 0")));
    }
    if !warp.interval.contains(s0) {
        return Err(Error::InvalidSpec(format!("s0 = {s0} outside the warp interval")));
    }
    let p = EikonalProfile::maximal(warp, s0, a, b);
    if let Some(info) = p.blowup_hi.or(p.blowup_lo) {
        return Err(Error::BlowUp {
            at: info.at,
            target: info.target,
        });
    }
    Ok(p)
}
