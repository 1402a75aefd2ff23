//! Scenario files: a spacetime, a null hypersurface, a rigging and the suites
//! to run on them, with deterministic reports.

mod report;
mod run;

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::expr::CompiledExpr;
use crate::geometry::{ChartMetric, DomainBox, Interval, JetMap, JetScalar, MetricChart, Signature};
use crate::hypersurface::{ensure_null, Immersion};
use crate::jet::Jet;
use crate::models::{make_hypersurface, make_rigging, make_spacetime, HypersurfaceSpec, Spacetime, SpacetimeSpec};
use crate::rigging::{gradient_rigging, RiggingField};
use crate::sampling::SampleSpec;

pub use report::{emit_report, Format, Report, ResidualRow, ResidualTable, SuiteReport, SuiteStatus};
pub use run::{exit_code, run_scenario, RunOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Classify,
    CurvatureRelations,
    Completeness,
    Bounds,
    Geodesics,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Identities,
        Suite::Classify,
        Suite::CurvatureRelations,
        Suite::Completeness,
        Suite::Bounds,
        Suite::Geodesics,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Classify => "classify",
            Suite::CurvatureRelations => "curvature_relations",
            Suite::Completeness => "completeness",
            Suite::Bounds => "bounds",
            Suite::Geodesics => "geodesics",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineSpacetime {
    #[serde(default)]
    pub name: Option<String>,
    pub coords: Vec<String>,
    /// Row-major `n×n` matrix of expressions in the coordinates.
    pub metric: Vec<Vec<String>>,
    #[serde(default)]
    pub domain: Option<Vec<Interval>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SpacetimeInput {
    Catalog(SpacetimeSpec),
    Inline { inline: InlineSpacetime },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineHypersurface {
    #[serde(default)]
    pub name: Option<String>,
    pub params: Vec<String>,
    /// One expression per ambient coordinate.
    pub map: Vec<String>,
    #[serde(default)]
    pub domain: Option<Vec<Interval>>,
    pub sample_box: Vec<Interval>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum HypersurfaceInput {
    Catalog(HypersurfaceSpec),
    Inline { inline: InlineHypersurface },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineRigging {
    #[serde(default)]
    pub label: Option<String>,
    /// Components in the ambient coordinates.
    #[serde(default)]
    pub field: Option<Vec<String>>,
    /// Potential `f` of a gradient rigging `ζ = ∇̄f`.
    #[serde(default)]
    pub gradient_of: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RiggingObject {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineRigging>,
    /// Replace `ζ` by `−ζ`.
    #[serde(default)]
    pub flip: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RiggingInput {
    Name(String),
    Object(RiggingObject),
}

fn has_inline(v: &serde_json::Value) -> bool {
    v.get("inline").is_some()
}

impl<'de> Deserialize<'de> for SpacetimeInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrap {
            inline: InlineSpacetime,
        }
        let v = serde_json::Value::deserialize(d)?;
        if has_inline(&v) {
            let w: Wrap = serde_json::from_value(v).map_err(D::Error::custom)?;
            Ok(SpacetimeInput::Inline { inline: w.inline })
        } else {
            serde_json::from_value(v).map(SpacetimeInput::Catalog).map_err(D::Error::custom)
        }
    }
}

impl<'de> Deserialize<'de> for HypersurfaceInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Wrap {
            inline: InlineHypersurface,
        }
        let v = serde_json::Value::deserialize(d)?;
        if has_inline(&v) {
            let w: Wrap = serde_json::from_value(v).map_err(D::Error::custom)?;
            Ok(HypersurfaceInput::Inline { inline: w.inline })
        } else {
            serde_json::from_value(v).map(HypersurfaceInput::Catalog).map_err(D::Error::custom)
        }
    }
}

impl<'de> Deserialize<'de> for RiggingInput {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => Ok(RiggingInput::Name(s)),
            other => {
                let o: RiggingObject = serde_json::from_value(other).map_err(D::Error::custom)?;
                if o.name.is_some() == o.inline.is_some() {
                    return Err(D::Error::custom("rigging needs exactly one of `name` and `inline`"));
                }
                Ok(RiggingInput::Object(o))
            }
        }
    }
}

fn default_count() -> usize {
    200
}
fn default_seed() -> u64 {
    1
}
fn default_tol() -> f64 {
    1e-7
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Default tolerance for residual tables.
    #[serde(default = "default_tol")]
    pub tolerance: f64,
    /// Per-check tolerance overrides, keyed by check name.
    #[serde(default)]
    pub overrides: BTreeMap<String, f64>,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            count: default_count(),
            seed: default_seed(),
            tolerance: default_tol(),
            overrides: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_points")]
    pub directions: usize,
    #[serde(default = "default_t")]
    pub t_max: f64,
}

fn default_points() -> usize {
    8
}
fn default_t() -> f64 {
    10.0
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            points: 8,
            directions: 8,
            t_max: 10.0,
        }
    }
}

/// `k` in the mean-curvature bound: a number, or `"auto"` for the sampled
/// infimum `max(0, −min Ric̄(ξ,ξ))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundK {
    Value(f64),
    Auto(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub k: BoundK,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { k: BoundK::Value(0.0) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
    pub t_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicsConfig {
    #[serde(default)]
    pub initial: Vec<InitialCondition>,
    #[serde(default = "default_starts")]
    pub search_starts: usize,
    #[serde(default = "default_dirs")]
    pub search_directions: usize,
    #[serde(default = "default_smax")]
    pub search_s_max: f64,
}

fn default_starts() -> usize {
    6
}
fn default_dirs() -> usize {
    4
}
fn default_smax() -> f64 {
    20.0
}

impl Default for GeodesicsConfig {
    fn default() -> Self {
        GeodesicsConfig {
            initial: Vec::new(),
            search_starts: default_starts(),
            search_directions: default_dirs(),
            search_s_max: default_smax(),
        }
    }
}

/// Optional expected verdicts; a mismatch fails the suite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<crate::shape::Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completeness: Option<crate::rigged::ProbeVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<crate::rigged::BoundVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_geodesics: Option<bool>,
    /// Treat `R̃ic(X,ξ) = 0` as a checked property.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mixed_ricci_flat: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub spacetime: SpacetimeInput,
    pub hypersurface: HypersurfaceInput,
    pub rigging: RiggingInput,
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub completeness: ProbeConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
    #[serde(default)]
    pub geodesics: GeodesicsConfig,
    #[serde(default)]
    pub expect: Expectations,
}

/// Scenarios shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("minkowski-null-plane", include_str!("../../scenarios/minkowski-null-plane.json")),
    ("lightcone-dt", include_str!("../../scenarios/lightcone-dt.json")),
    ("lightcone-dt-4d", include_str!("../../scenarios/lightcone-dt-4d.json")),
    ("grw-t2plus1-graph", include_str!("../../scenarios/grw-t2plus1-graph.json")),
    ("rw-umbilic-cone", include_str!("../../scenarios/rw-umbilic-cone.json")),
    ("rw-null-plane", include_str!("../../scenarios/rw-null-plane.json")),
    ("grw-exp-axial", include_str!("../../scenarios/grw-exp-axial.json")),
    ("inline-null-plane", include_str!("../../scenarios/inline-null-plane.json")),
];

impl Scenario {
    pub fn from_json(src: &str) -> Result<Scenario> {
        let s: Scenario = serde_json::from_str(src)?;
        s.validate()?;
        Ok(s)
    }

    pub fn bundled(name: &str) -> Result<Scenario> {
        let (_, src) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        Scenario::from_json(src)
    }

    /// Read a scenario file; a missing path that names a bundled scenario loads that instead.
    pub fn load(path: &Path) -> Result<Scenario> {
        if !path.exists() {
            if let Some(name) = path.to_str() {
                if BUNDLED.iter().any(|(n, _)| *n == name) {
                    return Scenario::bundled(name);
                }
            }
        }
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidSpec(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.sampling.count == 0 {
            return Err(Error::InvalidSpec("sampling.count must be at least 1".into()));
        }
        if !(self.sampling.tolerance > 0.0) {
            return Err(Error::InvalidSpec("sampling.tolerance must be positive".into()));
        }
        if let BoundK::Auto(s) = &self.bounds.k {
            if s != "auto" {
                return Err(Error::InvalidSpec(format!("bounds.k must be a number or \"auto\", got `{s}`")));
            }
        }
        Ok(())
    }

    /// Suites in canonical order, without repeats.
    pub fn suite_order(&self) -> Vec<Suite> {
        let mut v = self.suites.clone();
        v.sort();
        v.dedup();
        v
    }
}

/// Geometric objects a scenario resolves to.
#[derive(Clone, Debug)]
pub struct Resolved {
    /// Catalog spacetime, when the scenario names one.
    pub spacetime: Option<Spacetime>,
    pub chart: Arc<MetricChart>,
    pub imm: Immersion,
    pub rig: RiggingField,
}

fn compile_all(srcs: &[String], vars: &[&str]) -> Result<Vec<CompiledExpr>> {
    srcs.iter().map(|s| CompiledExpr::new(s, vars)).collect()
}

fn inline_chart(s: &InlineSpacetime) -> Result<MetricChart> {
    let n = s.coords.len();
    if n < 3 {
        return Err(Error::InvalidSpec("inline spacetime needs at least 3 coordinates".into()));
    }
    if s.metric.len() != n || s.metric.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidSpec(format!("inline metric must be {n}x{n}")));
    }
    let vars: Vec<&str> = s.coords.iter().map(String::as_str).collect();
    let flat: Vec<String> = s.metric.iter().flatten().cloned().collect();
    let exprs = compile_all(&flat, &vars)?;
    let metric: JetMap = Arc::new(move |x: &[Jet]| exprs.iter().map(|e| e.eval(x)).collect());
    let domain = match &s.domain {
        Some(d) if d.len() == n => DomainBox::new(d.clone()),
        Some(_) => return Err(Error::InvalidSpec("inline spacetime domain has the wrong dimension".into())),
        None => DomainBox::unbounded(n),
    };
    Ok(MetricChart::new(
        s.name.clone().unwrap_or_else(|| "inline".into()),
        s.coords.clone(),
        domain,
        Signature::Lorentzian,
        metric,
    ))
}

fn inline_immersion(h: &InlineHypersurface, chart: Arc<MetricChart>) -> Result<Immersion> {
    let m = h.params.len();
    if m + 1 != chart.dim() {
        return Err(Error::InvalidSpec(format!(
            "inline hypersurface needs {} parameters for a {}-dimensional spacetime",
            chart.dim() - 1,
            chart.dim()
        )));
    }
    if h.map.len() != chart.dim() {
        return Err(Error::InvalidSpec("inline map needs one expression per ambient coordinate".into()));
    }
    if h.sample_box.len() != m || h.sample_box.iter().any(|a| !a.lo.is_finite() || !a.hi.is_finite()) {
        return Err(Error::InvalidSpec("sample_box must give one finite interval per parameter".into()));
    }
    let vars: Vec<&str> = h.params.iter().map(String::as_str).collect();
    let exprs = compile_all(&h.map, &vars)?;
    let map: JetMap = Arc::new(move |u: &[Jet]| exprs.iter().map(|e| e.eval(u)).collect());
    let domain = match &h.domain {
        Some(d) if d.len() == m => DomainBox::new(d.clone()),
        Some(_) => return Err(Error::InvalidSpec("inline hypersurface domain has the wrong dimension".into())),
        None => DomainBox::unbounded(m),
    };
    Ok(Immersion::new(
        h.name.clone().unwrap_or_else(|| "inline".into()),
        chart,
        h.params.clone(),
        domain,
        DomainBox::new(h.sample_box.clone()),
        map,
    ))
}

fn inline_rigging(r: &InlineRigging, chart: &Arc<MetricChart>, probes: &[Vec<f64>]) -> Result<RiggingField> {
    let vars: Vec<&str> = chart.coords().iter().map(String::as_str).collect();
    match (&r.field, &r.gradient_of) {
        (Some(field), None) => {
            if field.len() != chart.dim() {
                return Err(Error::InvalidSpec("inline rigging needs one component per ambient coordinate".into()));
            }
            let exprs = compile_all(field, &vars)?;
            let f: JetMap = Arc::new(move |x: &[Jet]| exprs.iter().map(|e| e.eval(x)).collect());
            Ok(RiggingField::new(r.label.clone().unwrap_or_else(|| "inline".into()), f))
        }
        (None, Some(pot)) => {
            let e = CompiledExpr::new(pot, &vars)?;
            let f: JetScalar = Arc::new(move |x: &[Jet]| e.eval(x));
            let label = r.label.clone().unwrap_or_else(|| format!("grad({pot})"));
            Ok(gradient_rigging(chart.clone(), label, f, probes)?.0)
        }
        _ => Err(Error::InvalidSpec("inline rigging needs exactly one of `field` and `gradient_of`".into())),
    }
}

/// Build the spacetime, hypersurface and rigging named by a scenario.
pub fn resolve(s: &Scenario) -> Result<Resolved> {
    let (spacetime, chart) = match &s.spacetime {
        SpacetimeInput::Catalog(spec) => {
            let st = make_spacetime(spec)?;
            let c = st.chart.clone();
            (Some(st), c)
        }
        SpacetimeInput::Inline { inline } => (None, Arc::new(inline_chart(inline)?)),
    };
    let imm = match &s.hypersurface {
        HypersurfaceInput::Catalog(spec) => {
            let st = spacetime
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("catalog hypersurfaces need a catalog spacetime".into()))?;
            make_hypersurface(spec, st)?
        }
        HypersurfaceInput::Inline { inline } => {
            let imm = inline_immersion(inline, chart.clone())?;
            ensure_null(&imm, SampleSpec::new(16, 0x5eed), 1e-9)?;
            imm
        }
    };
    let (name, inline, flip) = match &s.rigging {
        RiggingInput::Name(n) => (Some(n.clone()), None, false),
        RiggingInput::Object(o) => (o.name.clone(), o.inline.clone(), o.flip),
    };
    let rig = match (name, inline) {
        (Some(n), _) => {
            let st = spacetime
                .as_ref()
                .ok_or_else(|| Error::InvalidSpec("catalog riggings need a catalog spacetime".into()))?;
            make_rigging(&n, st)?
        }
        (None, Some(r)) => {
            let probes: Vec<Vec<f64>> = imm
                .samples(SampleSpec::new(4, 0x5eed))
                .iter()
                .map(|u| imm.point(u))
                .collect::<Result<_>>()?;
            inline_rigging(&r, &chart, &probes)?
        }
        (None, None) => unreachable!("validated at parse time"),
    };
    let rig = if flip { rig.flipped() } else { rig };
    Ok(Resolved {
        spacetime,
        chart,
        imm,
        rig,
    })
}

/// Human-readable summary of a resolved scenario.
pub fn describe(s: &Scenario) -> Result<String> {
    let r = resolve(s)?;
    let mut out = String::new();
    let spacetime = match &s.spacetime {
        SpacetimeInput::Catalog(spec) => serde_json::to_string(spec)?,
        SpacetimeInput::Inline { .. } => "inline metric".to_string(),
    };
    out.push_str(&format!("scenario     {}\n", s.name));
    if !s.description.is_empty() {
        out.push_str(&format!("description  {}\n", s.description));
    }
    out.push_str(&format!(
        "spacetime    {} `{}` coords ({})\n",
        spacetime,
        r.chart.name(),
        r.chart.coords().join(", ")
    ));
    out.push_str(&format!(
        "hypersurface `{}` params ({})\n",
        r.imm.name,
        r.imm.param_coords.join(", ")
    ));
    out.push_str(&format!(
        "rigging      `{}`{}\n",
        r.rig.label,
        if r.rig.potential.is_some() { " (gradient)" } else { "" }
    ));
    let suites: Vec<&str> = s.suite_order().iter().map(|x| x.name()).collect();
    out.push_str(&format!("suites       {}\n", suites.join(", ")));
    out.push_str(&format!(
        "sampling     {} samples, seed {}, tolerance {:e}\n",
        s.sampling.count, s.sampling.seed, s.sampling.tolerance
    ));
    Ok(out)
}
