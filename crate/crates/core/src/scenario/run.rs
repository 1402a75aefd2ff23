use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::report::{Hypothesis, Metadata, Report, ResidualRow, ResidualTable, SuiteReport, SuiteStatus};
use super::{resolve, BoundK, Resolved, Scenario, Suite, SpacetimeInput, SCHEMA_VERSION};
use crate::error::Result;
use crate::geometry::ChartMetric;
use crate::models::SpacetimeSpec;
use crate::rigged::{
    closed_geodesic_search, completeness_probe, divergence_check_at, geodesic_integrate, gradient_identity_at,
    hessian_convexity_check, mean_curvature_bound_check, mixed_ricci_at, probe_initial_conditions,
    raychaudhuri_residual_at, rigged_metric_chart, screen_sectional_default_at, umbilic_bound_arithmetic,
    BoundTolerances, BoundVerdict, ClosedSearchSpec, GeodesicOptions, LeafRoute, ProbeReport, ProbeSpec,
};
use crate::rigging::{closedness_scan, conformality_scan, rigged_structure_at};
use crate::sampling::SampleSpec;
use crate::shape::{classify_hypersurface, identity_suite_at, shape_at, Classification, ClassifyTolerances, Kind};

/// Command-line overrides of the scenario's sampling block.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
}

enum Cell {
    Value(f64),
    Skip(String),
}

type SampleOutcome = Result<Vec<(String, Cell)>>;

type Skipped = Vec<(usize, String)>;

/// Per-sample outcomes regrouped into tables, in first-seen check order.
struct Collected {
    order: Vec<String>,
    rows: BTreeMap<String, (Vec<ResidualRow>, Skipped)>,
    errors: Vec<(usize, String)>,
}

fn collect(pts: &[Vec<f64>], f: impl Fn(&[f64]) -> SampleOutcome + Sync) -> Collected {
    let results: Vec<SampleOutcome> = pts.par_iter().map(|u| f(u)).collect();
    let mut c = Collected {
        order: Vec::new(),
        rows: BTreeMap::new(),
        errors: Vec::new(),
    };
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok(cells) => {
                for (name, cell) in cells {
                    if !c.rows.contains_key(&name) {
                        c.order.push(name.clone());
                    }
                    let e = c.rows.entry(name).or_default();
                    match cell {
                        Cell::Value(v) => e.0.push(ResidualRow {
                            sample_index: k,
                            coords: pts[k].clone(),
                            residual: v,
                        }),
                        Cell::Skip(why) => e.1.push((k, why)),
                    }
                }
            }
            Err(e) => c.errors.push((k, e.to_string())),
        }
    }
    c
}

struct Ctx<'a> {
    s: &'a Scenario,
    r: &'a Resolved,
    pts: Vec<Vec<f64>>,
    seed: u64,
    tol: f64,
    probe: Option<ProbeReport>,
    classification: Option<Classification>,
}

impl Ctx<'_> {
    fn tol_for(&self, check: &str) -> f64 {
        self.s.sampling.overrides.get(check).copied().unwrap_or(self.tol)
    }

    fn tables(&self, c: Collected, informational: &[&str]) -> (Vec<ResidualTable>, Vec<(usize, String)>) {
        let mut rows = c.rows;
        let tables = c
            .order
            .iter()
            .map(|name| {
                let (r, sk) = rows.remove(name).expect("collected check");
                let tol = (!informational.contains(&name.as_str())).then(|| self.tol_for(name));
                ResidualTable::new(name, tol, r, sk)
            })
            .collect();
        (tables, c.errors)
    }

    fn probe(&mut self) -> Result<ProbeReport> {
        if let Some(p) = &self.probe {
            return Ok(p.clone());
        }
        let chart = rigged_metric_chart(&self.r.imm, &self.r.rig)?;
        let c = &self.s.completeness;
        let spec = ProbeSpec {
            points: c.points,
            directions: c.directions,
            t_max: c.t_max,
            seed: self.seed,
        };
        let p = completeness_probe(&chart, chart.sample_box(), &spec);
        self.probe = Some(p.clone());
        Ok(p)
    }

    fn classification(&mut self) -> Classification {
        if let Some(c) = &self.classification {
            return c.clone();
        }
        let c = classify_hypersurface(&self.r.imm, &self.r.rig, &self.pts, ClassifyTolerances::default());
        self.classification = Some(c.clone());
        c
    }
}

fn base_status(tables: &[ResidualTable], errors: &[(usize, String)]) -> SuiteStatus {
    if !errors.is_empty() {
        SuiteStatus::Error
    } else if tables.iter().all(|t| t.passed) {
        SuiteStatus::Pass
    } else {
        SuiteStatus::Fail
    }
}

fn error_notes(errors: &[(usize, String)], pts: &[Vec<f64>]) -> Vec<String> {
    errors
        .iter()
        .map(|(k, e)| format!("sample {k} at {:?}: {e}", pts[*k]))
        .collect()
}

fn suite_error(suite: Suite, e: crate::error::Error) -> SuiteReport {
    SuiteReport {
        suite: suite.name().into(),
        status: SuiteStatus::Error,
        tables: Vec::new(),
        hypotheses: Vec::new(),
        details: serde_json::Value::Null,
        notes: vec![e.to_string()],
    }
}

fn expectation<T: PartialEq + serde::Serialize>(
    what: &str,
    expected: &Option<T>,
    got: &T,
    status: &mut SuiteStatus,
    notes: &mut Vec<String>,
) -> bool {
    match expected {
        Some(e) if e != got => {
            *status = status.and(SuiteStatus::Fail);
            notes.push(format!(
                "expected {what} {}, got {}",
                serde_json::to_string(e).unwrap_or_default(),
                serde_json::to_string(got).unwrap_or_default()
            ));
            false
        }
        Some(_) => true,
        None => false,
    }
}

fn closed_and_conformal(ctx: &Ctx) -> Vec<Hypothesis> {
    let amb: Vec<Vec<f64>> = ctx.pts.iter().filter_map(|u| ctx.r.imm.point(u).ok()).collect();
    let cl = closedness_scan(&ctx.r.imm.chart, &ctx.r.rig, &amb, 1e-9);
    let cf = conformality_scan(&ctx.r.imm.chart, &ctx.r.rig, &amb, 1e-9);
    vec![
        Hypothesis {
            name: "rigging_closed".into(),
            holds: cl.is_closed,
            detail: format!("max |d alpha| = {:.3e}", cl.max_residual),
        },
        Hypothesis {
            name: "rigging_conformal".into(),
            holds: cf.is_conformal,
            detail: format!("max conformality defect = {:.3e}", cf.max_residual),
        },
    ]
}

fn identities(ctx: &mut Ctx) -> SuiteReport {
    let (imm, rig) = (&ctx.r.imm, &ctx.r.rig);
    let c = collect(&ctx.pts, |u| {
        let mut out: Vec<(String, Cell)> = Vec::new();
        for chk in identity_suite_at(imm, rig, u)? {
            out.push((chk.name, match (chk.residual, chk.skipped) {
                (Some(v), _) => Cell::Value(v),
                (None, why) => Cell::Skip(why.unwrap_or_default()),
            }));
        }
        for (name, v) in rigged_structure_at(imm, rig, u)?.invariant_residuals() {
            out.push((name.into(), Cell::Value(v)));
        }
        Ok(out)
    });
    let (tables, errors) = ctx.tables(c, &[]);
    let hypotheses = closed_and_conformal(ctx);
    let scan = crate::hypersurface::null_scan(imm, SampleSpec::new(ctx.pts.len(), ctx.seed), 1e-9);
    SuiteReport {
        suite: Suite::Identities.name().into(),
        status: base_status(&tables, &errors),
        notes: error_notes(&errors, &ctx.pts),
        tables,
        hypotheses,
        details: json!({
            "null_scan_max_residual": scan.max_residual,
            "null_scan_max_kernel_dim": scan.max_kernel_dim,
            "is_null": scan.is_null,
        }),
    }
}

fn classify(ctx: &mut Ctx) -> SuiteReport {
    let cl = ctx.classification();
    let pts = &ctx.pts;
    let rows = |v: &[f64]| -> Vec<ResidualRow> {
        v.iter()
            .enumerate()
            .map(|(k, x)| ResidualRow {
                sample_index: k,
                coords: pts[k].clone(),
                residual: *x,
            })
            .collect()
    };
    let mut notes = Vec::new();
    let mut status = if cl.failures.is_empty() { SuiteStatus::Pass } else { SuiteStatus::Error };
    notes.extend(error_notes(&cl.failures, pts));
    let tables = if cl.failures.is_empty() {
        vec![
            ResidualTable::new("umbilic_rho", None, rows(&cl.umbilic_rho), Vec::new()),
            ResidualTable::new("screen_conformal_phi", None, rows(&cl.phi), Vec::new()),
        ]
    } else {
        Vec::new()
    };
    if expectation("classification", &ctx.s.expect.classification, &cl.kind, &mut status, &mut notes) {
        notes.push("classification matches the expected kind".into());
    }
    SuiteReport {
        suite: Suite::Classify.name().into(),
        status,
        tables,
        hypotheses: Vec::new(),
        details: serde_json::to_value(&cl).unwrap_or_default(),
        notes,
    }
}

/// `(c, f, f′)` at `t` for a Robertson-Walker scenario.
fn rw_data(ctx: &Ctx, t: f64) -> Option<(f64, f64, f64)> {
    let st = ctx.r.spacetime.as_ref()?;
    match (&ctx.s.spacetime, &st.spec) {
        (SpacetimeInput::Catalog(_), SpacetimeSpec::RobertsonWalker { c, .. }) => {
            let d = st.warp.as_ref()?.derivatives(t, 1);
            Some((*c, d[0], d[1]))
        }
        _ => None,
    }
}

fn curvature_relations(ctx: &mut Ctx) -> SuiteReport {
    let (imm, rig) = (&ctx.r.imm, &ctx.r.rig);
    let dim4 = imm.param_dim() >= 3;
    let ctx_ref = &*ctx;
    let c = collect(&ctx.pts, |u| {
        let mut out: Vec<(String, Cell)> = Vec::new();
        let mr = mixed_ricci_at(imm, rig, u)?;
        out.push(("mixed_ricci".into(), Cell::Value(mr.max_abs)));
        out.push((
            "curvature_difference_formula".into(),
            match mr.difference_residual {
                Some(v) => Cell::Value(v),
                None => Cell::Skip("rigging not closed".into()),
            },
        ));
        if dim4 {
            let ss = screen_sectional_default_at(imm, rig, u)?;
            match ss.route {
                LeafRoute::Leaf => {
                    out.push(("screen_sectional_relation".into(), Cell::Value(ss.residual)));
                    out.push((
                        "screen_leaf_vs_gauss".into(),
                        Cell::Value((ss.k_tilde_screen - ss.gauss_cross_check).abs()),
                    ));
                }
                LeafRoute::Projected => {
                    out.push(("screen_sectional_relation".into(), Cell::Skip("screen distribution not integrable".into())));
                }
            }
            let rs = rigged_structure_at(imm, rig, u)?;
            if let Some((cc, f, fp)) = rw_data(ctx_ref, rs.point[0]) {
                let bmax = shape_at(imm, rig, u)?.b_screen().amax();
                out.push((
                    "scaled_gauss_curvature".into(),
                    if bmax < 1e-9 && ss.route == LeafRoute::Leaf {
                        Cell::Value((f * f * ss.k_tilde_screen - (cc - fp * fp)).abs())
                    } else {
                        Cell::Skip("hypersurface not totally geodesic here".into())
                    },
                ));
            }
        }
        out.push(("raychaudhuri".into(), Cell::Value(raychaudhuri_residual_at(imm, rig, u)?.residual)));
        out.push(("mean_curvature_divergence".into(), Cell::Value(divergence_check_at(imm, rig, u)?.residual)));
        if rig.potential.is_some() {
            let g = gradient_identity_at(imm, rig, u)?;
            out.push(("gradient_identity".into(), Cell::Value(g.residual)));
            out.push(("xi_unit_norm".into(), Cell::Value(g.unit_residual)));
        } else {
            out.push(("gradient_identity".into(), Cell::Skip("rigging has no potential".into())));
        }
        Ok(out)
    });
    let mut info = vec![];
    if ctx.s.expect.mixed_ricci_flat != Some(true) {
        info.push("mixed_ricci");
    }
    let (tables, errors) = ctx.tables(c, &info);
    let hypotheses = closed_and_conformal(ctx);
    let mut status = base_status(&tables, &errors);
    let mut notes = error_notes(&errors, &ctx.pts);
    if dim4 && !hypotheses[0].holds {
        status = status.and(SuiteStatus::HypothesisFailure);
        notes.push("screen sectional relation needs an integrable screen (closed rigging)".into());
    }
    if !dim4 {
        notes.push("screen sectional relation needs ambient dimension at least 4".into());
    }
    SuiteReport {
        suite: Suite::CurvatureRelations.name().into(),
        status,
        tables,
        hypotheses,
        details: serde_json::Value::Null,
        notes,
    }
}

fn completeness(ctx: &mut Ctx) -> SuiteReport {
    let p = match ctx.probe() {
        Ok(p) => p,
        Err(e) => return suite_error(Suite::Completeness, e),
    };
    let mut status = SuiteStatus::Pass;
    let mut notes = vec![format!(
        "{} of {} geodesics reached T = {}; the probe can only find incompleteness",
        p.reached, p.total, p.t_max
    )];
    if !p.rejected.is_empty() {
        notes.push(format!("{} initial conditions rejected", p.rejected.len()));
    }
    expectation("completeness verdict", &ctx.s.expect.completeness, &p.verdict, &mut status, &mut notes);
    SuiteReport {
        suite: Suite::Completeness.name().into(),
        status,
        tables: Vec::new(),
        hypotheses: Vec::new(),
        details: serde_json::to_value(&p).unwrap_or_default(),
        notes,
    }
}

fn bounds(ctx: &mut Ctx) -> SuiteReport {
    let p = match ctx.probe() {
        Ok(p) => p,
        Err(e) => return suite_error(Suite::Bounds, e),
    };
    let (imm, rig) = (&ctx.r.imm, &ctx.r.rig);
    let first = mean_curvature_bound_check(imm, rig, &ctx.pts, 0.0, &p, BoundTolerances::default());
    let k = match &ctx.s.bounds.k {
        BoundK::Value(k) => *k,
        BoundK::Auto(_) => (-first.min_ric_xi).max(0.0),
    };
    let b = if k == 0.0 { first } else { mean_curvature_bound_check(imm, rig, &ctx.pts, k, &p, BoundTolerances::default()) };
    let pts = &ctx.pts;
    let ident: Vec<ResidualRow> = b
        .samples
        .iter()
        .filter_map(|s| {
            s.ricci_identity_residual.map(|r| ResidualRow {
                sample_index: s.index,
                coords: pts[s.index].clone(),
                residual: r,
            })
        })
        .collect();
    let habs: Vec<ResidualRow> = b
        .samples
        .iter()
        .map(|s| ResidualRow {
            sample_index: s.index,
            coords: pts[s.index].clone(),
            residual: s.mean_curvature.abs(),
        })
        .collect();
    let tables = vec![
        ResidualTable::new("closed_ricci_identity", Some(ctx.tol_for("closed_ricci_identity")), ident, Vec::new()),
        ResidualTable::new("mean_curvature_abs", None, habs, Vec::new()),
    ];
    let mut status = base_status(&tables, &b.failures);
    let mut notes = error_notes(&b.failures, pts);
    notes.extend(b.reasons.iter().cloned());
    let matched = expectation("bound verdict", &ctx.s.expect.bound, &b.verdict, &mut status, &mut notes);
    match b.verdict {
        BoundVerdict::Verified => notes.push(format!("|H| <= k verified with k = {k}")),
        BoundVerdict::Violated => status = status.and(SuiteStatus::Fail),
        BoundVerdict::NotApplicable => {
            notes.push("mean curvature bound not applicable".into());
            if !matched {
                status = status.and(SuiteStatus::HypothesisFailure);
            }
        }
    }
    let mut details = serde_json::to_value(&b).unwrap_or_default();
    if b.verdict != BoundVerdict::NotApplicable {
        let cl = ctx.classification();
        if cl.kind == Kind::TotallyUmbilic {
            let n = imm.param_dim() - 1;
            let ok = b
                .samples
                .iter()
                .all(|s| umbilic_bound_arithmetic(s.mean_curvature, s.astar_norm_sq, n, 1e-9));
            details["umbilic_arithmetic_consistent"] = json!(ok);
            if !ok {
                status = status.and(SuiteStatus::Fail);
            }
        }
    }
    SuiteReport {
        suite: Suite::Bounds.name().into(),
        status,
        tables,
        hypotheses: Vec::new(),
        details,
        notes,
    }
}

fn geodesics(ctx: &mut Ctx) -> SuiteReport {
    let chart = match rigged_metric_chart(&ctx.r.imm, &ctx.r.rig) {
        Ok(c) => c,
        Err(e) => return suite_error(Suite::Geodesics, e),
    };
    let g = &ctx.s.geodesics;
    let ics: Vec<(Vec<f64>, Vec<f64>, f64)> = if g.initial.is_empty() {
        let spec = ProbeSpec {
            points: 2,
            directions: 2,
            t_max: ctx.s.completeness.t_max,
            seed: ctx.seed,
        };
        probe_initial_conditions(chart.dim(), chart.sample_box(), &spec)
            .into_iter()
            .map(|(u, v)| (u, v, spec.t_max))
            .collect()
    } else {
        g.initial.iter().map(|ic| (ic.u0.clone(), ic.v0.clone(), ic.t_max)).collect()
    };
    let opts = GeodesicOptions {
        record_path: false,
        ..GeodesicOptions::for_box(chart.sample_box())
    };
    let runs: Vec<_> = ics
        .par_iter()
        .map(|(u, v, t)| geodesic_integrate(&chart, u, v, *t, &opts))
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut outcomes = Vec::new();
    for (k, r) in runs.into_iter().enumerate() {
        match r {
            Ok(res) => {
                rows.push(ResidualRow {
                    sample_index: k,
                    coords: ics[k].0.clone(),
                    residual: res.energy_drift,
                });
                outcomes.push(json!({
                    "index": k,
                    "status": res.status,
                    "final_s": res.final_s,
                    "exit": res.exit,
                }));
            }
            Err(e) => errors.push((k, e.to_string())),
        }
    }
    let mut tables = vec![ResidualTable::new(
        "energy_drift",
        Some(ctx.s.sampling.overrides.get("energy_drift").copied().unwrap_or(1e-6)),
        rows,
        Vec::new(),
    )];
    let search = closed_geodesic_search(
        &chart,
        chart.sample_box(),
        &ClosedSearchSpec {
            starts: g.search_starts,
            directions: g.search_directions,
            s_max: g.search_s_max,
            seed: ctx.seed,
            ..Default::default()
        },
    );
    let mut hypotheses = Vec::new();
    let mut notes: Vec<String> = errors.iter().map(|(k, e)| format!("initial condition {k}: {e}")).collect();
    let mut details = json!({
        "integrations": outcomes,
        "closed_search": {
            "found": search.found,
            "attempts": search.attempts,
            "best_mismatch": if search.best_mismatch.is_finite() { json!(search.best_mismatch) } else { json!(null) },
        },
    });
    let mut status = base_status(&tables, &errors);
    let (imm, rig) = (&ctx.r.imm, &ctx.r.rig);
    let gradient = rig.potential.is_some();
    hypotheses.push(Hypothesis {
        name: "gradient_rigging".into(),
        holds: gradient,
        detail: if gradient { "rigging carries a potential".into() } else { "no potential; Hessian check skipped".into() },
    });
    if gradient {
        let per: Vec<Result<f64>> = ctx
            .pts
            .par_iter()
            .map(|u| hessian_convexity_check(imm, rig, std::slice::from_ref(u)).map(|h| h.residual))
            .collect();
        let mut hrows = Vec::new();
        for (k, r) in per.into_iter().enumerate() {
            match r {
                Ok(v) => hrows.push(ResidualRow {
                    sample_index: k,
                    coords: ctx.pts[k].clone(),
                    residual: v,
                }),
                Err(e) => notes.push(format!("sample {k}: {e}")),
            }
        }
        tables.push(ResidualTable::new("hessian_plus_b", Some(ctx.tol_for("hessian_plus_b")), hrows, Vec::new()));
        status = status.and(base_status(&tables, &[]));
        match hessian_convexity_check(imm, rig, &ctx.pts) {
            Ok(h) => {
                details["convexity"] = json!({
                    "b_screen": h.b_screen,
                    "convex": h.convex,
                    "convex_after_flip": h.convex_after_flip,
                });
            }
            Err(e) => notes.push(e.to_string()),
        }
    } else {
        status = status.and(SuiteStatus::HypothesisFailure);
    }
    let found = !search.found.is_empty();
    expectation("closed geodesics found", &ctx.s.expect.closed_geodesics, &found, &mut status, &mut notes);
    notes.push(if found {
        format!("{} closed geodesic candidates found", search.found.len())
    } else {
        format!("no closed geodesic found within a budget of {} shots", search.attempts)
    });
    SuiteReport {
        suite: Suite::Geodesics.name().into(),
        status,
        tables,
        hypotheses,
        details,
        notes,
    }
}

/// Execute every requested suite. Construction failures of the scenario itself are errors;
/// failures inside a suite are recorded in its report.
pub fn run_scenario(s: &Scenario, opts: RunOptions) -> Result<Report> {
    let start = Instant::now();
    let r = resolve(s)?;
    let seed = opts.seed.unwrap_or(s.sampling.seed);
    let count = opts.samples.unwrap_or(s.sampling.count).max(1);
    let tol = opts.tolerance.unwrap_or(s.sampling.tolerance);
    let pts = r.imm.samples(SampleSpec::new(count, seed));
    let mut ctx = Ctx {
        s,
        r: &r,
        pts,
        seed,
        tol,
        probe: None,
        classification: None,
    };
    let mut suites = Vec::new();
    for suite in s.suite_order() {
        suites.push(match suite {
            Suite::Identities => identities(&mut ctx),
            Suite::Classify => classify(&mut ctx),
            Suite::CurvatureRelations => curvature_relations(&mut ctx),
            Suite::Completeness => completeness(&mut ctx),
            Suite::Bounds => bounds(&mut ctx),
            Suite::Geodesics => geodesics(&mut ctx),
        });
    }
    let status = suites.iter().fold(SuiteStatus::Pass, |a, x| a.and(x.status));
    let spacetime = match &s.spacetime {
        SpacetimeInput::Catalog(spec) => serde_json::to_string(spec)?,
        SpacetimeInput::Inline { .. } => format!("inline `{}`", r.chart.name()),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        scenario: s.name.clone(),
        seed,
        samples: count,
        tolerance: tol,
        spacetime,
        hypersurface: r.imm.name.clone(),
        rigging: r.rig.label.clone(),
        status,
        suites,
        metadata: Metadata {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s: start.elapsed().as_secs_f64(),
            unix_time: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    })
}

/// 0 when every suite passed, 2 when only hypotheses failed, 1 otherwise.
pub fn exit_code(r: &Report) -> i32 {
    match r.status {
        SuiteStatus::Pass => 0,
        SuiteStatus::HypothesisFailure => 2,
        SuiteStatus::Fail | SuiteStatus::Error => 1,
    }
}
