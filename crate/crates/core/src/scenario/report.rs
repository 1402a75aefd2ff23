use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Pass,
    /// Some hypothesis of a conditional check does not hold; nothing failed.
    HypothesisFailure,
    Fail,
    Error,
}

impl SuiteStatus {
    fn badge(self) -> &'static str {
        match self {
            SuiteStatus::Pass => "PASS",
            SuiteStatus::HypothesisFailure => "HYPOTHESIS",
            SuiteStatus::Fail => "FAIL",
            SuiteStatus::Error => "ERROR",
        }
    }

    /// The worse of two statuses.
    pub fn and(self, other: SuiteStatus) -> SuiteStatus {
        let rank = |s: SuiteStatus| match s {
            SuiteStatus::Pass => 0,
            SuiteStatus::HypothesisFailure => 1,
            SuiteStatus::Fail => 2,
            SuiteStatus::Error => 3,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub sample_index: usize,
    pub coords: Vec<f64>,
    pub residual: f64,
}

/// One named residual over the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualTable {
    pub check: String,
    /// `None` for informational tables that do not affect the status.
    pub tolerance: Option<f64>,
    pub max: f64,
    pub mean: f64,
    pub argmax: Option<usize>,
    pub passed: bool,
    pub rows: Vec<ResidualRow>,
    /// `(sample index, reason)` where the check did not apply.
    pub skipped: Vec<(usize, String)>,
}

impl ResidualTable {
    pub fn new(check: &str, tolerance: Option<f64>, rows: Vec<ResidualRow>, skipped: Vec<(usize, String)>) -> ResidualTable {
        let mut max = 0.0f64;
        let mut argmax = None;
        let mut sum = 0.0;
        let mut finite = true;
        // non-finite residuals are stored as f64::MAX so the JSON stays numeric
        let rows: Vec<ResidualRow> = rows
            .into_iter()
            .map(|mut r| {
                if !r.residual.is_finite() {
                    finite = false;
                    r.residual = f64::MAX;
                }
                r
            })
            .collect();
        for r in &rows {
            if argmax.is_none() || r.residual > max {
                max = r.residual;
                argmax = Some(r.sample_index);
            }
            sum += r.residual;
        }
        let mean = if rows.is_empty() { 0.0 } else { sum / rows.len() as f64 };
        let passed = match tolerance {
            Some(t) => finite && rows.iter().all(|r| r.residual <= t),
            None => true,
        };
        ResidualTable {
            check: check.to_string(),
            tolerance,
            max: if finite { max } else { f64::MAX },
            mean: if finite { mean } else { f64::MAX },
            argmax,
            passed,
            rows,
            skipped,
        }
    }
}

/// A hypothesis evaluated for conditional checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: SuiteStatus,
    pub tables: Vec<ResidualTable>,
    pub hypotheses: Vec<Hypothesis>,
    /// Suite-specific verdicts and probe outcomes.
    pub details: serde_json::Value,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub wall_time_s: f64,
    pub unix_time: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub spacetime: String,
    pub hypersurface: String,
    pub rigging: String,
    pub status: SuiteStatus,
    pub suites: Vec<SuiteReport>,
    /// Everything that varies between identical runs lives here.
    pub metadata: Metadata,
}

impl Report {
    /// JSON without the metadata block, for determinism comparisons.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("metadata");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} [{}]\n", self.scenario, self.status.badge());
        let _ = writeln!(s, "- spacetime: `{}`", self.spacetime);
        let _ = writeln!(s, "- hypersurface: `{}`", self.hypersurface);
        let _ = writeln!(s, "- rigging: `{}`", self.rigging);
        let _ = writeln!(
            s,
            "- {} samples, seed {}, tolerance {:e}\n",
            self.samples, self.seed, self.tolerance
        );
        for suite in &self.suites {
            let _ = writeln!(s, "## {} [{}]\n", suite.suite, suite.status.badge());
            if !suite.tables.is_empty() {
                let _ = writeln!(s, "| check | max | mean | argmax | tolerance | result |");
                let _ = writeln!(s, "|---|---|---|---|---|---|");
                for t in &suite.tables {
                    let tol = t.tolerance.map_or("info".to_string(), |v| format!("{v:.1e}"));
                    let res = match (t.tolerance, t.passed) {
                        (None, _) => "-",
                        (Some(_), true) => "PASS",
                        (Some(_), false) => "FAIL",
                    };
                    let arg = t.argmax.map_or("-".to_string(), |a| a.to_string());
                    let _ = writeln!(
                        s,
                        "| {} | {:.3e} | {:.3e} | {} | {} | {}{} |",
                        t.check,
                        t.max,
                        t.mean,
                        arg,
                        tol,
                        res,
                        if t.skipped.is_empty() { String::new() } else { format!(" ({} skipped)", t.skipped.len()) }
                    );
                }
                s.push('\n');
            }
            for h in &suite.hypotheses {
                let _ = writeln!(s, "- hypothesis `{}`: {} ({})", h.name, if h.holds { "holds" } else { "fails" }, h.detail);
            }
            for n in &suite.notes {
                let _ = writeln!(s, "- {n}");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "_{} {}, {:.3} s_",
            self.metadata.tool, self.metadata.version, self.metadata.wall_time_s
        );
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Format, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            _ => Err(format!("unknown format `{s}` (json, csv, md)")),
        }
    }
}

fn csv_name(suite: &str, check: &str) -> String {
    let clean: String = check
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    format!("{suite}__{clean}.csv")
}

/// Write the report into `dir`; returns the files written.
pub fn emit_report(r: &Report, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    match format {
        Format::Json => {
            let p = dir.join("report.json");
            std::fs::write(&p, r.to_json()? + "\n")?;
            out.push(p);
        }
        Format::Md => {
            let p = dir.join("report.md");
            std::fs::write(&p, r.to_markdown())?;
            out.push(p);
        }
        Format::Csv => {
            for suite in &r.suites {
                for t in &suite.tables {
                    let p = dir.join(csv_name(&suite.suite, &t.check));
                    let mut s = String::from("check,sample_index,coords,residual\n");
                    for row in &t.rows {
                        let coords: Vec<String> = row.coords.iter().map(|c| format!("{c:e}")).collect();
                        let _ = writeln!(s, "{},{},{},{:e}", t.check, row.sample_index, coords.join(";"), row.residual);
                    }
                    std::fs::write(&p, s)?;
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}
