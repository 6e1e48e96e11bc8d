//! Residual reports: one structured record per check, emitted both as a
//! machine-readable body (JSON lines, schema versioned) and a human table.
//! The body is deterministic for a fixed config and seed; timestamps live
//! in the header only.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// Stable check identifier; rows are sorted by it.
    pub check: String,
    /// The mathematical property the check verifies.
    pub law: String,
    pub region: String,
    pub boundary: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    /// Free-form header lines (config path, seed, timestamp).
    pub header: Vec<String>,
}

impl Report {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    fn sorted_rows(&self) -> Vec<&ReportRow> {
        let mut rows: Vec<&ReportRow> = self.rows.iter().collect();
        rows.sort_by(|a, b| a.check.cmp(&b.check));
        rows
    }

    /// The deterministic body: one JSON object per line, sorted by check
    /// id.
    pub fn body(&self) -> String {
        let mut out = String::new();
        for row in self.sorted_rows() {
            out.push_str(&serde_json::to_string(row).expect("row serializes"));
            out.push('\n');
        }
        out
    }

    /// Full report file: commented header, then the body.
    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# gibbslab report schema {REPORT_SCHEMA_VERSION}").unwrap();
        for h in &self.header {
            writeln!(out, "# {h}").unwrap();
        }
        out.push_str(&self.body());
        out
    }

    /// Aligned table for terminals.
    pub fn human_table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{:<38} {:<34} {:>12} {:>10} {:>5}",
            "check", "law", "residual", "tolerance", "pass"
        )
        .unwrap();
        for row in self.sorted_rows() {
            writeln!(
                out,
                "{:<38} {:<34} {:>12.3e} {:>10.1e} {:>5}",
                row.check,
                row.law,
                row.residual,
                row.tolerance,
                if row.pass { "ok" } else { "FAIL" }
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(check: &str, residual: f64, tolerance: f64) -> ReportRow {
        ReportRow {
            check: check.into(),
            law: "specification.consistency".into(),
            region: "[0]".into(),
            boundary: "zeros".into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            note: None,
        }
    }

    #[test]
    fn body_is_sorted_and_stable() {
        let mut report = Report::default();
        report.push(row("b-check", 1e-12, 1e-10));
        report.push(row("a-check", 2e-9, 1e-10));
        let body = report.body();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].contains("a-check"));
        assert!(lines[1].contains("b-check"));
        assert!(!report.all_pass());
        // Rendering twice is byte-identical.
        assert_eq!(report.body(), body);
        // Rows parse back.
        let parsed: ReportRow = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(parsed.check, "a-check");
    }

    #[test]
    fn header_lines_are_commented() {
        let mut report = Report::default();
        report.header.push("seed: 7".into());
        report.push(row("x", 0.0, 1e-10));
        let rendered = report.render();
        assert!(rendered.starts_with("# gibbslab report schema 1\n# seed: 7\n"));
        assert!(report.human_table().contains("ok"));
    }
}
