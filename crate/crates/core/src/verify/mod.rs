//! Identity suites over sampled chart points, and the reports they produce.
//!
//! A run resolves a chart, draws seeded points from its `sample` rules,
//! evaluates every planned check at every point (in parallel), and merges
//! the results into a [`CheckReport`] sorted by `(check_id, point)`. Reports
//! for the same inputs are byte-identical in every output format.

mod checks;
mod context;
mod report;

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use checks::{identity_suite, plan, CheckDef, SUITES};
pub use report::{emit_report, render, ReportFormat};

use crate::catalog::{self, CatalogError};
use crate::dsl::{parse_chart, print_chart, ChartSpec, ParseError, SampleRule};
use context::PointContext;

pub const TOOL_VERSION: &str = concat!("qch ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("suite `{suite}` has no checks for chart `{chart}`")]
    NotApplicable { suite: String, chart: String },
    #[error("tolerance key `{0}` matches no check of this suite")]
    UnknownTolerance(String),
    #[error("invalid run option: {0}")]
    Options(String),
    #[error("coordinate `{0}` has no sample rule")]
    MissingSample(String),
    #[error("domain too thin: {accepted} of {wanted} points accepted after {attempts} draws")]
    DomainTooThin { wanted: usize, accepted: usize, attempts: usize },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("report: {0}")]
    Report(String),
}

/// Whether a residual must stay below or rise above its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    AtMost,
    Exceeds,
}

impl Expect {
    pub fn as_str(self) -> &'static str {
        match self {
            Expect::AtMost => "at_most",
            Expect::Exceeds => "exceeds",
        }
    }

    fn passes(self, residual: f64, tol: f64) -> bool {
        match self {
            Expect::AtMost => residual <= tol,
            Expect::Exceeds => residual > tol,
        }
    }
}

/// Where a check is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// One entry per point.
    PerPoint,
    /// Evaluated per point, reported once with the largest residual.
    Aggregate,
    /// Independent of the sample points.
    Global,
}

/// A chart together with how it was named and its content hash.
#[derive(Debug, Clone)]
pub struct ChartSource {
    pub chart: ChartSpec,
    pub label: String,
    /// SHA-256 of the chart text (printed text for catalog charts).
    pub hash: String,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl ChartSource {
    pub fn catalog(name: &str) -> Result<ChartSource, VerifyError> {
        let chart = catalog::chart(name)?;
        let hash = sha256_hex(print_chart(&chart).as_bytes());
        Ok(ChartSource { chart, label: name.to_string(), hash })
    }

    pub fn from_text(label: &str, text: &str) -> Result<ChartSource, VerifyError> {
        let chart = parse_chart(text)?;
        Ok(ChartSource { chart, label: label.to_string(), hash: sha256_hex(text.as_bytes()) })
    }

    pub fn from_chart(label: &str, chart: ChartSpec) -> ChartSource {
        let hash = sha256_hex(print_chart(&chart).as_bytes());
        ChartSource { chart, label: label.to_string(), hash }
    }

    /// A catalog name, or else a path to a chart file.
    pub fn resolve(name_or_path: &str) -> Result<ChartSource, VerifyError> {
        if catalog::entry(name_or_path).is_ok() {
            return ChartSource::catalog(name_or_path);
        }
        let path = std::path::Path::new(name_or_path);
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            return ChartSource::from_text(name_or_path, &text);
        }
        Err(CatalogError::UnknownChart(name_or_path.to_string()).into())
    }
}

/// Knobs for [`run_suite`].
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub suite: String,
    pub n_points: usize,
    pub seed: u64,
    /// Jet order, 2 or 3.
    pub order: usize,
    /// Overrides keyed by check id or id prefix (`kahler`, `killing.isometry`).
    pub tolerances: Vec<(String, f64)>,
    pub controls: bool,
    /// Distance kept from every domain-constraint zero set.
    pub margin: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            suite: "full".into(),
            n_points: 20,
            seed: 42,
            order: 2,
            tolerances: Vec::new(),
            controls: false,
            margin: 1e-6,
        }
    }
}

/// One check at one point (or aggregated / global when `point` is `None`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub check_id: String,
    pub point: Option<usize>,
    /// `None` when evaluation failed; the entry then fails.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub expect: Expect,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub n_pass: usize,
    pub n_fail: usize,
    /// Largest residual among `at_most` entries.
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub suite: String,
    pub chart: String,
    pub family: String,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
    pub n_points: usize,
    pub order: usize,
    pub points: Vec<Vec<f64>>,
    pub entries: Vec<Entry>,
    pub summary: Summary,
    pub tool_version: String,
    pub chart_file_hash: String,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.summary.n_fail == 0
    }

    /// Largest residual of a check over all its entries.
    pub fn max_residual_of(&self, check_id: &str) -> Option<f64> {
        self.entries.iter().filter(|e| e.check_id == check_id).filter_map(|e| e.residual).reduce(f64::max)
    }

    /// Whether every entry of `check_id` passed (false if there are none).
    pub fn check_passed(&self, check_id: &str) -> bool {
        let mut it = self.entries.iter().filter(|e| e.check_id == check_id).peekable();
        it.peek().is_some() && it.all(|e| e.pass)
    }

    /// Distinct check ids in report order.
    pub fn check_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.check_id.as_str()).collect();
        ids.dedup();
        ids
    }
}

fn summarize(entries: &[Entry]) -> Summary {
    let n_pass = entries.iter().filter(|e| e.pass).count();
    let max_residual = entries
        .iter()
        .filter(|e| e.expect == Expect::AtMost)
        .filter_map(|e| e.residual)
        .fold(0.0f64, |m, r| if r.is_nan() { m } else { m.max(r) });
    Summary { n_pass, n_fail: entries.len() - n_pass, max_residual }
}

fn bound(chart: &ChartSpec, e: &crate::dsl::Expr) -> Result<f64, VerifyError> {
    let v = chart.eval_f64(e, &[]);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(VerifyError::Options(format!("sample bound evaluates to {v}")))
    }
}

/// Seeded uniform points from the chart's sample rules, rejecting points
/// within `margin` of any domain-constraint zero set.
pub fn sample_points(chart: &ChartSpec, n: usize, seed: u64, margin: f64) -> Result<Vec<Vec<f64>>, VerifyError> {
    if n == 0 {
        return Err(VerifyError::Options("at least one point is required".into()));
    }
    let dim = chart.dim();
    let mut covered = vec![false; dim];
    for rule in &chart.sample {
        for c in rule.coords() {
            covered[c] = true;
        }
    }
    if let Some(c) = covered.iter().position(|c| !c) {
        return Err(VerifyError::MissingSample(chart.coords[c].clone()));
    }
    let mut ranges = Vec::with_capacity(chart.sample.len());
    for rule in &chart.sample {
        let (lo, hi) = match rule {
            SampleRule::Interval { lo, hi, .. } | SampleRule::Polar { lo, hi, .. } => (bound(chart, lo)?, bound(chart, hi)?),
        };
        if !(lo < hi) {
            return Err(VerifyError::DomainTooThin { wanted: n, accepted: 0, attempts: 0 });
        }
        ranges.push((lo, hi));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_attempts = 100 * n;
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0;
    while points.len() < n {
        if attempts == max_attempts {
            return Err(VerifyError::DomainTooThin { wanted: n, accepted: points.len(), attempts });
        }
        attempts += 1;
        let mut p = vec![0.0; dim];
        for (rule, &(lo, hi)) in chart.sample.iter().zip(&ranges) {
            match rule {
                SampleRule::Interval { coord, .. } => p[*coord] = rng.random_range(lo..hi),
                SampleRule::Polar { x, y, .. } => {
                    let r = rng.random_range(lo..hi);
                    let t = rng.random_range(0.0..std::f64::consts::TAU);
                    p[*x] = r * t.cos();
                    p[*y] = r * t.sin();
                }
            }
        }
        if chart.check_domain(&p, margin).is_ok() {
            points.push(p);
        }
    }
    Ok(points)
}

fn apply_tolerances(plan: &mut [CheckDef], overrides: &[(String, f64)]) -> Result<(), VerifyError> {
    for (key, tol) in overrides {
        if !(tol.is_finite() && *tol >= 0.0) {
            return Err(VerifyError::Options(format!("tolerance for `{key}` must be a finite non-negative number")));
        }
        let mut hit = false;
        for c in plan.iter_mut() {
            let id = c.id.as_str();
            let matches = id == key
                || id.strip_prefix(key.as_str()).is_some_and(|rest| rest.starts_with('.') || rest.starts_with('['));
            if matches {
                c.tolerance = *tol;
                hit = true;
            }
        }
        if !hit {
            return Err(VerifyError::UnknownTolerance(key.clone()));
        }
    }
    Ok(())
}

fn entry(def: &CheckDef, point: Option<usize>, outcome: Result<checks::Outcome, String>) -> Entry {
    match outcome {
        Ok(o) => {
            let pass = !o.residual.is_nan() && def.expect.passes(o.residual, def.tolerance);
            Entry {
                check_id: def.id.clone(),
                point,
                residual: Some(o.residual),
                tolerance: def.tolerance,
                expect: def.expect,
                pass,
                note: o.note,
            }
        }
        Err(msg) => Entry {
            check_id: def.id.clone(),
            point,
            residual: None,
            tolerance: def.tolerance,
            expect: def.expect,
            pass: false,
            note: Some(format!("error: {msg}")),
        },
    }
}

/// Run `opts.suite` on a chart.
pub fn run_suite(source: &ChartSource, opts: &RunOptions) -> Result<CheckReport, VerifyError> {
    if !(opts.order == 2 || opts.order == 3) {
        return Err(VerifyError::Options(format!("order must be 2 or 3, got {}", opts.order)));
    }
    let chart = &source.chart;
    let mut defs = plan(chart, &opts.suite, opts.controls)?;
    apply_tolerances(&mut defs, &opts.tolerances)?;
    let shared = checks::Shared::new(chart, &defs).map_err(|e| VerifyError::Report(e.to_string()))?;
    let points = sample_points(chart, opts.n_points, opts.seed, opts.margin)?;

    let local: Vec<&CheckDef> = defs.iter().filter(|d| d.scope != Scope::Global).collect();
    let per_point: Vec<Vec<Result<checks::Outcome, String>>> = points
        .par_iter()
        .enumerate()
        .map(|(index, p)| match PointContext::new(chart, p, index, opts.order, opts.seed) {
            Ok(ctx) => local.iter().map(|d| checks::evaluate(&d.kind, &d.id, &ctx, &shared)).collect(),
            Err(e) => local.iter().map(|_| Err(e.clone())).collect(),
        })
        .collect();

    let mut entries = Vec::new();
    for def in &defs {
        match def.scope {
            Scope::Global => {
                let r = checks::evaluate_global(&def.kind, chart, opts.seed).map(checks::Outcome::from);
                entries.push(entry(def, None, r));
            }
            Scope::PerPoint => {
                let k = local.iter().position(|d| d.id == def.id).expect("local check");
                for (index, row) in per_point.iter().enumerate() {
                    let r = match &row[k] {
                        Ok(o) => Ok(checks::Outcome { residual: o.residual, note: o.note.clone() }),
                        Err(e) => Err(e.clone()),
                    };
                    entries.push(entry(def, Some(index), r));
                }
            }
            Scope::Aggregate => {
                let k = local.iter().position(|d| d.id == def.id).expect("local check");
                let mut worst: Option<(usize, f64)> = None;
                let mut errors = Vec::new();
                for (index, row) in per_point.iter().enumerate() {
                    match &row[k] {
                        Ok(o) if !o.residual.is_nan() => {
                            if worst.is_none_or(|(_, w)| o.residual > w) {
                                worst = Some((index, o.residual));
                            }
                        }
                        Ok(_) => errors.push(format!("point {index}: NaN")),
                        Err(e) => errors.push(format!("point {index}: {e}")),
                    }
                }
                let r = match worst {
                    Some((index, w)) => {
                        let mut note = format!("max over {} points at point {index}", points.len());
                        if !errors.is_empty() {
                            note.push_str(&format!("; {} evaluation errors", errors.len()));
                        }
                        Ok(checks::Outcome { residual: w, note: Some(note) })
                    }
                    None => Err(errors.first().cloned().unwrap_or_else(|| "no points".into())),
                };
                entries.push(entry(def, None, r));
            }
        }
    }
    entries.sort_by(|a, b| a.check_id.cmp(&b.check_id).then(a.point.cmp(&b.point)));
    let summary = summarize(&entries);
    Ok(CheckReport {
        suite: opts.suite.clone(),
        chart: source.label.clone(),
        family: chart.name.clone(),
        params: chart.params.iter().cloned().collect(),
        seed: opts.seed,
        n_points: points.len(),
        order: opts.order,
        points,
        entries,
        summary,
        tool_version: TOOL_VERSION.to_string(),
        chart_file_hash: source.hash.clone(),
    })
}
