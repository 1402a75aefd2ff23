//! Geodesics of Riemannian charts: adaptive Dormand–Prince 5(4) integration,
//! one-sided completeness probes and closed-geodesic search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{inner, metric_at, ChartMetric, DomainBox, MetricDerivs};
use crate::sampling::{random_directions, sample_box, SampleSpec};

#[derive(Clone, Copy, Debug)]
pub struct GeodesicOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Minimum step as a fraction of the requested length.
    pub h_min_factor: f64,
    /// Coordinate radius treated as escape to infinity.
    pub escape_radius: f64,
    pub max_steps: usize,
    pub record_path: bool,
}

impl Default for GeodesicOptions {
    fn default() -> Self {
        GeodesicOptions {
            rtol: 1e-9,
            atol: 1e-12,
            h_min_factor: 1e-12,
            escape_radius: 1e6,
            max_steps: 1_000_000,
            record_path: true,
        }
    }
}

impl GeodesicOptions {
    /// Escape radius `1e6 · diameter` of a finite box.
    pub fn for_box(b: &DomainBox) -> GeodesicOptions {
        let d = b
            .axes
            .iter()
            .map(|a| (a.hi - a.lo).powi(2))
            .filter(|v| v.is_finite())
            .sum::<f64>()
            .sqrt()
            .max(1.0);
        GeodesicOptions {
            escape_radius: 1e6 * d,
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeodesicStatus {
    ReachedT,
    BoundaryExit,
    StepCollapse,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExitData {
    pub s: f64,
    pub u: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicResult {
    /// `(s, u(s), u̇(s))` at accepted steps.
    pub path: Vec<(f64, Vec<f64>, Vec<f64>)>,
    pub status: GeodesicStatus,
    pub exit: Option<ExitData>,
    /// Largest `|g(u̇,u̇) − 1|` seen.
    pub energy_drift: f64,
    pub final_s: f64,
    pub final_u: Vec<f64>,
    pub final_v: Vec<f64>,
    pub steps: usize,
}

enum Eval {
    Ok(Vec<f64>),
    Outside(String),
}

fn rhs(chart: &dyn ChartMetric, y: &[f64]) -> Eval {
    let n = y.len() / 2;
    let (u, v) = y.split_at(n);
    if !chart.domain().contains(u) {
        return Eval::Outside("left the chart domain".into());
    }
    let d = match MetricDerivs::at(chart, u, 1) {
        Ok(d) => d,
        Err(e) => return Eval::Outside(e.to_string()),
    };
    let gamma = d.christoffel();
    let acc = gamma.contract(v, v);
    let mut out = v.to_vec();
    out.extend(acc.into_iter().map(|a| -a));
    if out.iter().any(|x| !x.is_finite()) {
        return Eval::Outside("non-finite geodesic equation".into());
    }
    Eval::Ok(out)
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// `(y5, error estimate, last stage)` of an accepted-or-not trial step.
type Trial = (Vec<f64>, Vec<f64>, Vec<f64>);

/// One trial step; `Err` carries the reason a stage left the domain.
fn dopri_step(chart: &dyn ChartMetric, y: &[f64], k1: &[f64], h: f64) -> Result<Trial, String> {
    let n = y.len();
    let mut k: Vec<Vec<f64>> = vec![k1.to_vec()];
    for s in 1..7 {
        let ys: Vec<f64> = (0..n)
            .map(|i| y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>())
            .collect();
        match rhs(chart, &ys) {
            Eval::Ok(v) => k.push(v),
            Eval::Outside(r) => return Err(r),
        }
    }
    let y5: Vec<f64> = (0..n).map(|i| y[i] + h * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>()).collect();
    let err: Vec<f64> = (0..n)
        .map(|i| h * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>())
        .collect();
    let k7 = k.pop().expect("seven stages");
    Ok((y5, err, k7))
}

fn speed2(chart: &dyn ChartMetric, u: &[f64], v: &[f64]) -> Option<f64> {
    metric_at(chart, u).ok().map(|g| inner(&g, v, v))
}

/// Integrate the unit-speed geodesic from `u0` in direction `v0` up to arclength `t_max`.
pub fn geodesic_integrate(
    chart: &dyn ChartMetric,
    u0: &[f64],
    v0: &[f64],
    t_max: f64,
    opts: &GeodesicOptions,
) -> crate::error::Result<GeodesicResult> {
    let g0 = metric_at(chart, u0)?;
    let q = inner(&g0, v0, v0);
    if !(q > 0.0) {
        return Err(crate::error::Error::DegenerateSpan);
    }
    let n = u0.len();
    let mut y: Vec<f64> = u0.iter().copied().chain(v0.iter().map(|x| x / q.sqrt())).collect();
    let mut s = 0.0;
    let h_min = opts.h_min_factor * t_max;
    let mut h = (0.01 * t_max).min(0.05);
    let mut path = Vec::new();
    if opts.record_path {
        path.push((0.0, y[..n].to_vec(), y[n..].to_vec()));
    }
    let mut drift = 0.0f64;
    let mut steps = 0;
    let mut k1 = match rhs(chart, &y) {
        Eval::Ok(k) => k,
        Eval::Outside(r) => return Err(crate::error::Error::InvalidSpec(r)),
    };
    let mut last_reason: Option<String> = None;
    let finish = |status, exit, path, drift, s: f64, y: &[f64], steps| GeodesicResult {
        path,
        status,
        exit,
        energy_drift: drift,
        final_s: s,
        final_u: y[..n].to_vec(),
        final_v: y[n..].to_vec(),
        steps,
    };
    while s < t_max {
        if steps >= opts.max_steps {
            let exit = ExitData { s, u: y[..n].to_vec(), reason: "step budget exhausted".into() };
            return Ok(finish(GeodesicStatus::StepCollapse, Some(exit), path, drift, s, &y, steps));
        }
        let last = s + h >= t_max;
        let hh = if last { t_max - s } else { h };
        if hh < h_min && !last {
            let (status, reason) = match last_reason.take() {
                Some(r) => (GeodesicStatus::BoundaryExit, r),
                None => (GeodesicStatus::StepCollapse, "step size below minimum".to_string()),
            };
            let exit = ExitData { s, u: y[..n].to_vec(), reason };
            return Ok(finish(status, Some(exit), path, drift, s, &y, steps));
        }
        match dopri_step(chart, &y, &k1, hh) {
            Err(reason) => {
                last_reason = Some(reason);
                h = hh * 0.25;
            }
            Ok((ynew, err, k7)) => {
                let en = (0..2 * n)
                    .map(|i| {
                        let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
                        (err[i] / sc).powi(2)
                    })
                    .sum::<f64>()
                    / (2 * n) as f64;
                let en = en.sqrt();
                if en <= 1.0 {
                    s += hh;
                    y = ynew;
                    chart.domain().wrap(&mut y[..n]);
                    k1 = k7;
                    steps += 1;
                    last_reason = None;
                    if let Some(q) = speed2(chart, &y[..n], &y[n..]) {
                        drift = drift.max((q - 1.0).abs());
                    }
                    if opts.record_path {
                        path.push((s, y[..n].to_vec(), y[n..].to_vec()));
                    }
                    let radius = y[..n].iter().map(|x| x * x).sum::<f64>().sqrt();
                    if radius > opts.escape_radius {
                        let exit = ExitData { s, u: y[..n].to_vec(), reason: "escape radius exceeded".into() };
                        return Ok(finish(GeodesicStatus::BoundaryExit, Some(exit), path, drift, s, &y, steps));
                    }
                    if last {
                        s = t_max;
                        break;
                    }
                    let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
                    h = hh * fac;
                } else {
                    h = hh * (0.9 * en.powf(-0.2)).clamp(0.2, 1.0);
                }
            }
        }
    }
    Ok(finish(GeodesicStatus::ReachedT, None, path, drift, s, &y, steps))
}

/// Parameters of a completeness probe.
#[derive(Clone, Copy, Debug)]
pub struct ProbeSpec {
    pub points: usize,
    pub directions: usize,
    pub t_max: f64,
    pub seed: u64,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec {
            points: 8,
            directions: 8,
            t_max: 10.0,
            seed: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeVerdict {
    NoIncompletenessDetectedUpToT,
    IncompletenessWitnessFound,
}

#[derive(Clone, Debug, Serialize)]
pub struct EscapeEvent {
    pub index: usize,
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    pub status: GeodesicStatus,
    pub s: f64,
    pub u: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub total: usize,
    pub reached: usize,
    pub fraction: f64,
    pub t_max: f64,
    pub max_energy_drift: f64,
    pub escapes: Vec<EscapeEvent>,
    /// Initial conditions rejected before integration (outside domain, degenerate metric).
    pub rejected: Vec<(usize, String)>,
    pub verdict: ProbeVerdict,
}

/// Initial conditions: coordinate axis directions `±∂_i` first, then seeded random ones.
pub fn probe_initial_conditions(dim: usize, sample: &DomainBox, spec: &ProbeSpec) -> Vec<(Vec<f64>, Vec<f64>)> {
    let pts = sample_box(sample, SampleSpec::new(spec.points, spec.seed));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut out = Vec::with_capacity(spec.points * spec.directions);
    for p in pts {
        let mut dirs = Vec::new();
        for i in 0..dim {
            for sign in [-1.0, 1.0] {
                let mut v = vec![0.0; dim];
                v[i] = sign;
                dirs.push(v);
            }
        }
        dirs.truncate(spec.directions);
        let extra = spec.directions - dirs.len();
        dirs.extend(random_directions(dim, extra, &mut rng));
        out.extend(dirs.into_iter().map(|d| (p.clone(), d)));
    }
    out
}

/// One-sided completeness heuristic: it can only find witnesses of incompleteness.
pub fn completeness_probe(chart: &dyn ChartMetric, sample: &DomainBox, spec: &ProbeSpec) -> ProbeReport {
    let ics = probe_initial_conditions(chart.dim(), sample, spec);
    let opts = GeodesicOptions {
        record_path: false,
        ..GeodesicOptions::for_box(sample)
    };
    let results: Vec<_> = ics
        .par_iter()
        .map(|(u, v)| geodesic_integrate(chart, u, v, spec.t_max, &opts))
        .collect();
    let mut reached = 0;
    let mut escapes = Vec::new();
    let mut rejected = Vec::new();
    let mut drift = 0.0f64;
    for (k, (r, (u0, v0))) in results.into_iter().zip(&ics).enumerate() {
        match r {
            Ok(g) => {
                drift = drift.max(g.energy_drift);
                if g.status == GeodesicStatus::ReachedT {
                    reached += 1;
                } else {
                    let e = g.exit.clone().expect("exit data");
                    escapes.push(EscapeEvent {
                        index: k,
                        u0: u0.clone(),
                        v0: v0.clone(),
                        status: g.status,
                        s: e.s,
                        u: e.u,
                        reason: e.reason,
                    });
                }
            }
            Err(e) => rejected.push((k, e.to_string())),
        }
    }
    let total = ics.len();
    ProbeReport {
        total,
        reached,
        fraction: if total > 0 { reached as f64 / total as f64 } else { 0.0 },
        t_max: spec.t_max,
        max_energy_drift: drift,
        verdict: if escapes.is_empty() {
            ProbeVerdict::NoIncompletenessDetectedUpToT
        } else {
            ProbeVerdict::IncompletenessWitnessFound
        },
        escapes,
        rejected,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ClosedSearchSpec {
    pub starts: usize,
    pub directions: usize,
    /// Longest period scanned.
    pub s_max: f64,
    /// Shortest period accepted.
    pub s_min: f64,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ClosedSearchSpec {
    fn default() -> Self {
        ClosedSearchSpec {
            starts: 6,
            directions: 4,
            s_max: 20.0,
            s_min: 0.5,
            tolerance: 1e-6,
            seed: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedGeodesic {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    pub period: f64,
    pub mismatch: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedSearchReport {
    pub found: Vec<ClosedGeodesic>,
    /// Smallest mismatch seen over all starts.
    pub best_mismatch: f64,
    pub attempts: usize,
}

fn mismatch(chart: &dyn ChartMetric, u0: &[f64], v0: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let dom = chart.domain();
    let du: Vec<f64> = dom.axes.iter().zip(u.iter().zip(u0)).map(|(a, (x, y))| a.difference(*x, *y)).collect();
    let dv: Vec<f64> = v.iter().zip(v0).map(|(a, b)| a - b).collect();
    match metric_at(chart, u0) {
        Ok(g) => inner(&g, &du, &du).max(0.0).sqrt() + inner(&g, &dv, &dv).max(0.0).sqrt(),
        Err(_) => f64::INFINITY,
    }
}

/// Mismatch after continuing the recorded state `(u, v)` for arclength `ds`.
fn mismatch_from(
    chart: &dyn ChartMetric,
    u0: &[f64],
    v0: &[f64],
    state: (&[f64], &[f64]),
    ds: f64,
    opts: &GeodesicOptions,
) -> f64 {
    if ds <= 0.0 {
        return mismatch(chart, u0, v0, state.0, state.1);
    }
    match geodesic_integrate(chart, state.0, state.1, ds, opts) {
        Ok(g) if g.status == GeodesicStatus::ReachedT => mismatch(chart, u0, v0, &g.final_u, &g.final_v),
        _ => f64::INFINITY,
    }
}

/// Coarse local minima refined per shot.
const REFINED_MINIMA: usize = 6;

/// Golden-section refinement of the mismatch on `[s_{k-1}, s_{k+1}]`, continuing
/// from the recorded state at `s_{k-1}`. Returns `(period, mismatch)`.
#[allow(clippy::too_many_arguments)]
fn refine_period(
    chart: &dyn ChartMetric,
    u0: &[f64],
    v0: &[f64],
    path: &[(f64, Vec<f64>, Vec<f64>)],
    k: usize,
    s_min: f64,
    coarse: f64,
    opts: &GeodesicOptions,
) -> (f64, f64) {
    let base = &path[k.saturating_sub(1)];
    let lo = base.0;
    let hi = path[(k + 1).min(path.len() - 1)].0;
    let f = |s: f64| mismatch_from(chart, u0, v0, (&base.1, &base.2), s - lo, opts);
    let (mut a, mut b) = (lo.max(s_min), hi.max(lo));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..60 {
        if (b - a).abs() < 1e-12 * b.abs().max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let (period, m) = if fc < fd { (c, fc) } else { (d, fd) };
    if m < coarse {
        (period, m)
    } else {
        (path[k].0, coarse)
    }
}

/// Multi-start shooting with a periodicity-mismatch scan and golden-section refinement.
/// A negative result is evidence, not proof.
pub fn closed_geodesic_search(chart: &dyn ChartMetric, sample: &DomainBox, spec: &ClosedSearchSpec) -> ClosedSearchReport {
    let probe = ProbeSpec {
        points: spec.starts,
        directions: spec.directions,
        t_max: spec.s_max,
        seed: spec.seed,
    };
    let ics = probe_initial_conditions(chart.dim(), sample, &probe);
    let opts = GeodesicOptions {
        rtol: 1e-11,
        atol: 1e-13,
        ..GeodesicOptions::for_box(sample)
    };
    let results: Vec<Option<ClosedGeodesic>> = ics
        .par_iter()
        .map(|(u0, v0)| {
            let g = geodesic_integrate(chart, u0, v0, spec.s_max, &opts).ok()?;
            let q = speed2(chart, u0, v0)?.sqrt();
            let v0n: Vec<f64> = v0.iter().map(|x| x / q).collect();
            // coarse scan over recorded steps: local minima of the mismatch
            let coarse: Vec<f64> = g
                .path
                .iter()
                .map(|(s, u, v)| if *s < spec.s_min { f64::INFINITY } else { mismatch(chart, u0, &v0n, u, v) })
                .collect();
            let mut minima: Vec<usize> = (0..coarse.len())
                .filter(|&k| {
                    coarse[k].is_finite()
                        && (k == 0 || coarse[k] <= coarse[k - 1])
                        && (k + 1 == coarse.len() || coarse[k] <= coarse[k + 1])
                })
                .collect();
            minima.sort_by(|a, b| coarse[*a].total_cmp(&coarse[*b]));
            minima.truncate(REFINED_MINIMA);
            let short = GeodesicOptions { record_path: false, ..opts };
            let refined: Vec<(f64, f64)> = minima
                .iter()
                .map(|&k| refine_period(chart, u0, &v0n, &g.path, k, spec.s_min, coarse[k], &short))
                .collect();
            // shortest period that closes up, else the smallest mismatch
            let (period, m) = refined
                .iter()
                .filter(|(_, m)| *m < spec.tolerance)
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .or_else(|| refined.iter().min_by(|a, b| a.1.total_cmp(&b.1)))
                .copied()?;
            Some(ClosedGeodesic {
                u0: u0.clone(),
                v0: v0n,
                period,
                mismatch: m,
            })
        })
        .collect();
    let best_mismatch = results
        .iter()
        .flatten()
        .map(|c| c.mismatch)
        .fold(f64::INFINITY, f64::min);
    ClosedSearchReport {
        found: results
            .into_iter()
            .flatten()
            .filter(|c| c.mismatch < spec.tolerance)
            .collect(),
        best_mismatch,
        attempts: ics.len(),
    }
}
