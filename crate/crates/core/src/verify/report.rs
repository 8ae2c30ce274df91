//! Report emitters. Floats are written as `{:.16e}` (17 significant digits)
//! and JSON keys in a fixed order, so output is byte-stable.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{CheckReport, Expect, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, VerifyError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(VerifyError::Options(format!("unknown format `{other}`"))),
        }
    }
}

fn float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".to_string()
    }
}

fn string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn json(r: &CheckReport) -> String {
    let mut o = String::new();
    o.push_str("{\n");
    let _ = writeln!(o, "  \"suite\": {},", string(&r.suite));
    let _ = writeln!(o, "  \"chart\": {},", string(&r.chart));
    let _ = writeln!(o, "  \"family\": {},", string(&r.family));
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{}: {}", string(k), float(*v))).collect();
    let _ = writeln!(o, "  \"params\": {{{}}},", params.join(", "));
    let _ = writeln!(o, "  \"seed\": {},", r.seed);
    let _ = writeln!(o, "  \"n_points\": {},", r.n_points);
    let _ = writeln!(o, "  \"order\": {},", r.order);
    o.push_str("  \"points\": [");
    for (i, p) in r.points.iter().enumerate() {
        let coords: Vec<String> = p.iter().map(|v| float(*v)).collect();
        let sep = if i + 1 == r.points.len() { "" } else { "," };
        let _ = write!(o, "\n    [{}]{sep}", coords.join(", "));
    }
    o.push_str(if r.points.is_empty() { "],\n" } else { "\n  ],\n" });
    o.push_str("  \"entries\": [");
    for (i, e) in r.entries.iter().enumerate() {
        let sep = if i + 1 == r.entries.len() { "" } else { "," };
        let _ = write!(
            o,
            "\n    {{\"check_id\": {}, \"point\": {}, \"residual\": {}, \"tolerance\": {}, \"expect\": \"{}\", \"pass\": {}, \"note\": {}}}{sep}",
            string(&e.check_id),
            e.point.map_or("null".to_string(), |p| p.to_string()),
            e.residual.map_or("null".to_string(), float),
            float(e.tolerance),
            e.expect.as_str(),
            e.pass,
            e.note.as_deref().map_or("null".to_string(), string),
        );
    }
    o.push_str(if r.entries.is_empty() { "],\n" } else { "\n  ],\n" });
    let _ = writeln!(
        o,
        "  \"summary\": {{\"n_pass\": {}, \"n_fail\": {}, \"max_residual\": {}}},",
        r.summary.n_pass,
        r.summary.n_fail,
        float(r.summary.max_residual)
    );
    let _ = writeln!(o, "  \"tool_version\": {},", string(&r.tool_version));
    let _ = writeln!(o, "  \"chart_file_hash\": {}", string(&r.chart_file_hash));
    o.push_str("}\n");
    o
}

fn csv(r: &CheckReport) -> Result<String, VerifyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| VerifyError::Report(e.to_string());
    w.write_record(["check_id", "point", "residual", "tolerance", "expect", "pass", "note"]).map_err(err)?;
    for e in &r.entries {
        w.write_record([
            e.check_id.clone(),
            e.point.map_or(String::new(), |p| p.to_string()),
            e.residual.map_or(String::new(), |v| format!("{v:.16e}")),
            format!("{:.16e}", e.tolerance),
            e.expect.as_str().to_string(),
            e.pass.to_string(),
            e.note.clone().unwrap_or_default(),
        ])
        .map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| VerifyError::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| VerifyError::Report(e.to_string()))
}

fn markdown(r: &CheckReport) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "# {} on {}\n", r.suite, r.chart);
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let _ = writeln!(o, "- family: {}", r.family);
    if !params.is_empty() {
        let _ = writeln!(o, "- params: {}", params.join(", "));
    }
    let _ = writeln!(o, "- seed: {}, points: {}, order: {}", r.seed, r.n_points, r.order);
    let _ = writeln!(
        o,
        "- passed: {}, failed: {}, max residual: {:.3e}",
        r.summary.n_pass, r.summary.n_fail, r.summary.max_residual
    );
    let _ = writeln!(o, "- {} / chart sha256 {}\n", r.tool_version, r.chart_file_hash);
    o.push_str("| check | entries | failed | max residual | tolerance | expect | status |\n");
    o.push_str("|---|---:|---:|---:|---:|---|---|\n");
    for id in r.check_ids() {
        let rows: Vec<_> = r.entries.iter().filter(|e| e.check_id == id).collect();
        let failed = rows.iter().filter(|e| !e.pass).count();
        let max = rows.iter().filter_map(|e| e.residual).reduce(f64::max);
        let tol = rows[0].tolerance;
        let expect = match rows[0].expect {
            Expect::AtMost => "≤",
            Expect::Exceeds => ">",
        };
        let _ = writeln!(
            o,
            "| `{id}` | {} | {failed} | {} | {tol:.1e} | {expect} | {} |",
            rows.len(),
            max.map_or("error".to_string(), |m| format!("{m:.3e}")),
            if failed == 0 { "pass" } else { "FAIL" }
        );
    }
    o
}

/// Render a report in the given format.
pub fn render(report: &CheckReport, format: ReportFormat) -> Result<String, VerifyError> {
    Ok(match format {
        ReportFormat::Json => json(report),
        ReportFormat::Csv => csv(report)?,
        ReportFormat::Markdown => markdown(report),
    })
}

/// Write a rendered report to `path`.
pub fn emit_report(report: &CheckReport, format: ReportFormat, path: &Path) -> Result<(), VerifyError> {
    std::fs::write(path, render(report, format)?)?;
    Ok(())
}

impl CheckReport {
    /// Parse a JSON report written by [`render`].
    pub fn from_json(text: &str) -> Result<CheckReport, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Report(e.to_string()))
    }
}
