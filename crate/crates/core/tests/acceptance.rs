//! The nine acceptance criteria, one reported line each.

use std::time::Instant;

use nalgebra::DMatrix;
use nullrig::geometry::{ChartMetric, DomainBox, Interval};
use nullrig::models::*;
use nullrig::rigged::*;
use nullrig::rigging::{rigged_structure_at, riemannian_ambient_metric};
use nullrig::sampling::{sample_box, SampleSpec};
use nullrig::scenario::{resolve, run_scenario, Resolved, RunOptions, Scenario, Suite, SuiteStatus, BUNDLED};
use nullrig::shape::{classify_hypersurface, shape_at, ClassifyTolerances};
use nullrig::Jet;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn resolved(name: &str) -> Resolved {
    resolve(&Scenario::bundled(name).unwrap()).unwrap()
}

fn samples(r: &Resolved, n: usize) -> Vec<Vec<f64>> {
    r.imm.samples(SampleSpec::new(n, 1))
}

const IDENTITY_CHECKS: &[&str] = &[
    "gauss_weingarten_consistency",
    "b_radical",
    "induced_connection_derc",
    "an_antisymmetry",
    "tau_from_an_xi",
    "xi_pregeodesic",
    "lie_xi_gtilde",
];

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    let mut ok = true;
    let mut notes = Vec::new();
    for name in ["minkowski-null-plane", "lightcone-dt", "lightcone-dt-4d", "grw-t2plus1-graph"] {
        let s = Scenario::bundled(name).unwrap();
        let start = Instant::now();
        let r = run_scenario(&s, RunOptions { seed: Some(1), samples: Some(200), tolerance: Some(1e-7) }).unwrap();
        let secs = start.elapsed().as_secs_f64();
        slowest = slowest.max(secs);
        ok &= secs < 10.0;
        let id = r.suites.iter().find(|x| x.suite == Suite::Identities.name()).unwrap();
        ok &= id.status == SuiteStatus::Pass;
        for check in IDENTITY_CHECKS {
            match id.tables.iter().find(|t| t.check == *check) {
                Some(t) => {
                    worst = worst.max(t.max);
                    ok &= t.max < 1e-7 && t.rows.len() == 200;
                }
                // the tau check is conditional; every bundled rigging here is closed
                None => {
                    ok = false;
                    notes.push(format!("{name}: {check} missing"));
                }
            }
        }
        for t in &id.tables {
            if t.tolerance.is_some() {
                worst = worst.max(t.max);
                ok &= t.max < 1e-7;
            }
        }
    }
    outcome(ok, format!("max identity residual {worst:.1e} over 200 samples, slowest scenario {slowest:.2} s {}", notes.join("; ")))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut charts = 0;
    let fibers = [
        FiberSpec::Flat { dim: 2 },
        FiberSpec::Flat { dim: 3 },
        FiberSpec::Sphere { c: 1.0, dim: 2 },
        FiberSpec::Hyperbolic { c: -1.0, dim: 3 },
    ];
    let mut specs = Vec::new();
    for warp in [WarpSpec::Exp, WarpSpec::T2plus1, WarpSpec::Cosh] {
        for fiber in &fibers {
            specs.push(SpacetimeSpec::Grw { warp: warp.clone(), fiber: fiber.clone() });
        }
        for c in [-1.0, 0.0, 1.0] {
            specs.push(SpacetimeSpec::RobertsonWalker { c, warp: warp.clone() });
        }
    }
    for spec in specs {
        let st = make_spacetime(&spec).unwrap();
        let rig = make_rigging("sqrt2_dt", &st).unwrap();
        let n = st.dim();
        let w = st.warp_or_one();
        // stay inside the angular ranges of curved fibers
        let mut axes = vec![Interval::new(-1.2, 1.2)];
        axes.extend(st.fiber.domain().iter().map(|a| {
            let lo = if a.lo.is_finite() { a.lo + 0.2 } else { -2.0 };
            let hi = if a.hi.is_finite() { a.hi - 0.2 } else { 2.0 };
            Interval::new(lo, hi)
        }));
        for p in sample_box(&DomainBox::new(axes), SampleSpec::new(100, 17)) {
            let m = riemannian_ambient_metric(&st.chart, &rig, &p).unwrap();
            let f = w.value(p[0]);
            let g0 = st.fiber.diagonal(&Jet::variables(&p[1..], 0));
            let mut expect = DMatrix::zeros(n, n);
            expect[(0, 0)] = 1.0;
            for i in 1..n {
                expect[(i, i)] = f * f * g0[i - 1].value();
            }
            worst = worst.max((m - expect).amax());
        }
        charts += 1;
    }
    outcome(worst < 1e-12, format!("max |g + a(x)a - diag(1, f^2 g0)| = {worst:.1e} over {charts} charts x 100 points"))
}

fn criterion_3() -> Outcome {
    let r = resolved("lightcone-dt");
    let pts = samples(&r, 200);
    let (mut h_rel, mut metric, mut ray) = (0.0f64, 0.0f64, 0.0f64);
    for u in &pts {
        let radius = u[0];
        let s = shape_at(&r.imm, &r.rig, u).unwrap();
        h_rel = h_rel.max((s.mean_curvature * radius - 1.0).abs());
        let rs = rigged_structure_at(&r.imm, &r.rig, u).unwrap();
        let polar = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, radius * radius]);
        metric = metric.max((rs.gtilde - polar).amax());
        ray = ray.max(raychaudhuri_residual_at(&r.imm, &r.rig, u).unwrap().residual);
    }
    let c = classify_hypersurface(&r.imm, &r.rig, &pts, ClassifyTolerances::default());
    let umb = pts.iter().zip(&c.umbilic_rho).map(|(u, rho)| (rho * u[0] - 1.0).abs()).fold(0.0, f64::max);
    let phi = c.phi.iter().map(|p| (p - 0.5).abs()).fold(0.0, f64::max);
    let pass = h_rel < 1e-6 && umb < 1e-6 && phi < 1e-9 && ray < 1e-8 && metric < 1e-10;
    outcome(
        pass,
        format!("H r - 1: {h_rel:.1e}, rho r - 1: {umb:.1e}, phi - 1/2: {phi:.1e}, Raychaudhuri {ray:.1e}, rigged - polar {metric:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["lightcone-dt-4d", "rw-null-plane"] {
        let r = resolved(name);
        let mut worst = 0.0f64;
        for u in samples(&r, 100) {
            let s = screen_sectional_default_at(&r.imm, &r.rig, &u).unwrap();
            ok &= s.route == LeafRoute::Leaf;
            worst = worst.max(s.residual);
        }
        ok &= worst < 1e-6;
        parts.push(format!("{name} residual {worst:.1e}"));
    }
    // Minkowski as RW: c = 0, f = 1, so the scaled screen curvature must vanish
    let r = resolved("rw-null-plane");
    let st = r.spacetime.as_ref().unwrap();
    let w = st.warp_or_one();
    let mut khat = 0.0f64;
    for u in samples(&r, 100) {
        let s = screen_sectional_default_at(&r.imm, &r.rig, &u).unwrap();
        let t = r.imm.point(&u).unwrap()[0];
        let d = w.derivatives(t, 1);
        khat = khat.max((d[0] * d[0] * s.k_tilde_screen - (0.0 - d[1] * d[1])).abs());
    }
    ok &= khat < 1e-8;
    parts.push(format!("|K^ - (c - f'^2)| {khat:.1e}"));
    outcome(ok, parts.join(", "))
}

fn criterion_5() -> Outcome {
    let mut worst = (0.0f64, 0.0f64);
    let cases: Vec<(SpacetimeSpec, HypersurfaceSpec, &str)> = vec![
        (
            SpacetimeSpec::Grw { warp: WarpSpec::T2plus1, fiber: FiberSpec::Flat { dim: 2 } },
            HypersurfaceSpec::GrwNullGraph { profile: Profile::Planar, s0: 0.0, direction: None, extent: None },
            "grad(h)",
        ),
        (
            SpacetimeSpec::Grw { warp: WarpSpec::Exp, fiber: FiberSpec::Flat { dim: 3 } },
            HypersurfaceSpec::GrwNullGraph { profile: Profile::Axial, s0: 0.0, direction: None, extent: None },
            "grad(h)",
        ),
        (SpacetimeSpec::RobertsonWalker { c: 0.0, warp: WarpSpec::Exp }, HypersurfaceSpec::Lightcone { vertex: None }, "f_dt"),
        (SpacetimeSpec::Minkowski { dim: 3 }, HypersurfaceSpec::Lightcone { vertex: None }, "dt"),
        (SpacetimeSpec::Minkowski { dim: 4 }, HypersurfaceSpec::NullPlane { direction: None, s0: 0.0 }, "dt"),
    ];
    for (st, hs, rig) in cases {
        let st = make_spacetime(&st).unwrap();
        let imm = make_hypersurface(&hs, &st).unwrap();
        let rig = make_rigging(rig, &st).unwrap();
        for u in imm.samples(SampleSpec::new(100, 1)) {
            let g = gradient_identity_at(&imm, &rig, &u).unwrap();
            worst = (worst.0.max(g.residual), worst.1.max(g.unit_residual));
        }
    }
    let inline = resolved("inline-null-plane");
    for u in samples(&inline, 100) {
        let g = gradient_identity_at(&inline.imm, &inline.rig, &u).unwrap();
        worst = (worst.0.max(g.residual), worst.1.max(g.unit_residual));
    }
    outcome(worst.0 < 1e-7 && worst.1 < 1e-9, format!("gradient residual {:.1e}, unit-norm residual {:.1e}", worst.0, worst.1))
}

fn probe(r: &Resolved) -> ProbeReport {
    let chart = rigged_metric_chart(&r.imm, &r.rig).unwrap();
    completeness_probe(&chart, chart.sample_box(), &ProbeSpec { points: 8, directions: 8, t_max: 10.0, seed: 1 })
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["minkowski-null-plane", "grw-t2plus1-graph"] {
        let p = probe(&resolved(name));
        ok &= p.total == 64 && p.fraction == 1.0;
        parts.push(format!("{name} {}/{}", p.reached, p.total));
    }
    let cone = resolved("lightcone-dt");
    let p = probe(&cone);
    let apex = p
        .escapes
        .iter()
        .filter(|e| e.status == GeodesicStatus::BoundaryExit && e.s.is_finite() && e.s <= 10.0 && e.u[0] < 1e-3)
        .count();
    ok &= apex > 0;
    parts.push(format!("lightcone {}/{} with {apex} apex witnesses", p.reached, p.total));
    let b = mean_curvature_bound_check(&cone.imm, &cone.rig, &samples(&cone, 50), 0.0, &p, BoundTolerances::default());
    ok &= b.verdict == BoundVerdict::NotApplicable;
    let plane = resolved("minkowski-null-plane");
    let pp = probe(&plane);
    let bp = mean_curvature_bound_check(&plane.imm, &plane.rig, &samples(&plane, 50), 0.0, &pp, BoundTolerances::default());
    ok &= bp.verdict == BoundVerdict::Verified;
    parts.push(format!("bound: lightcone {:?}, null plane (k = 0) {:?}", b.verdict, bp.verdict));
    outcome(ok, parts.join(", "))
}

fn criterion_7() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut gradient_scenarios = 0;
    for (name, _) in BUNDLED {
        let r = resolved(name);
        if r.rig.potential.is_none() {
            continue;
        }
        gradient_scenarios += 1;
        let h = hessian_convexity_check(&r.imm, &r.rig, &samples(&r, 100)).unwrap();
        worst = worst.max(h.residual);
    }
    ok &= worst < 1e-7;
    let mut none = Vec::new();
    for name in ["lightcone-dt", "minkowski-null-plane"] {
        let r = resolved(name);
        let chart = rigged_metric_chart(&r.imm, &r.rig).unwrap();
        let s = closed_geodesic_search(&chart, chart.sample_box(), &ClosedSearchSpec::default());
        ok &= s.found.is_empty();
        none.push(format!("{name} {} found", s.found.len()));
    }
    let sphere = round_sphere(1.0);
    let s = closed_geodesic_search(&sphere, sphere.domain(), &ClosedSearchSpec::default());
    let best = s.found.iter().min_by(|a, b| a.mismatch.total_cmp(&b.mismatch));
    let sphere_ok = best.is_some_and(|c| c.mismatch < 1e-6 && (c.period - std::f64::consts::TAU).abs() < 1e-6);
    ok &= sphere_ok;
    outcome(
        ok,
        format!(
            "Hessian + B {worst:.1e} on {gradient_scenarios} gradient scenarios, {}, sphere great circle {}",
            none.join(", "),
            best.map(|c| format!("period {:.8} mismatch {:.1e}", c.period, c.mismatch)).unwrap_or_else(|| "not found".into())
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in ["rw-umbilic-cone", "minkowski-null-plane", "lightcone-dt", "lightcone-dt-4d", "rw-null-plane", "inline-null-plane"] {
        let r = resolved(name);
        let worst = samples(&r, 100)
            .iter()
            .map(|u| mixed_ricci_at(&r.imm, &r.rig, u).unwrap().max_abs)
            .fold(0.0, f64::max);
        ok &= worst < 1e-6;
        parts.push(format!("{name} {worst:.1e}"));
    }
    outcome(ok, format!("max |Ric(X, xi)|: {}", parts.join(", ")))
}

fn criterion_9() -> Outcome {
    let mut ok = true;
    let mut sizes = Vec::new();
    for name in ["lightcone-dt", "inline-null-plane"] {
        let s = Scenario::bundled(name).unwrap();
        let opts = RunOptions { seed: Some(42), samples: None, tolerance: None };
        let a = run_scenario(&s, opts).unwrap().deterministic_json().unwrap();
        let b = run_scenario(&s, opts).unwrap().deterministic_json().unwrap();
        ok &= a == b;
        sizes.push(format!("{name} {} bytes", a.len()));
    }
    outcome(ok, format!("identical reports ({})", sizes.join(", ")))
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("identity suite", criterion_1),
        ("rigged ambient metric dt^2 + f^2 g0", criterion_2),
        ("lightcone closed forms", criterion_3),
        ("screen sectional relation", criterion_4),
        ("gradient rigging identities", criterion_5),
        ("completeness probe and mean curvature bound", criterion_6),
        ("Hessian, convexity and closed geodesics", criterion_7),
        ("mixed Ricci witness", criterion_8),
        ("determinism", criterion_9),
    ];
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        println!(
            "criterion {}: {} {name}: {} ({:.1} s)",
            k + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
