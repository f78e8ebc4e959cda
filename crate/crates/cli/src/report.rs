//! Line-delimited JSON report, per-series CSV files and a plain-text table.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use driftheat::monitors::Verdict;
use serde::Serialize;
use serde_json::json;

use crate::checks::{CheckOutcome, Series};
use crate::error::{CliError, EXIT_PASS, EXIT_VIOLATION};

pub const REPORT_FILE: &str = "report.jsonl";

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub seed: u64,
    /// Scenario echo, serialised as given after defaults are applied.
    pub scenario: serde_json::Value,
    pub outcomes: Vec<CheckOutcome>,
    /// Wall-clock per check; shown in the table, kept out of the files.
    pub timings: Vec<Duration>,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        if self.outcomes.iter().any(|o| o.verdict.is_failure()) {
            EXIT_VIOLATION
        } else {
            EXIT_PASS
        }
    }

    pub fn failures(&self) -> Vec<&str> {
        self.outcomes
            .iter()
            .filter(|o| o.verdict.is_failure())
            .map(|o| o.check.as_str())
            .collect()
    }

    pub fn jsonl(&self) -> Result<String, CliError> {
        let mut out = String::new();
        let head = json!({
            "record": "scenario",
            "name": self.name,
            "seed": self.seed,
            "scenario": self.scenario,
        });
        out.push_str(&serde_json::to_string(&head)?);
        out.push('\n');
        for o in &self.outcomes {
            #[derive(Serialize)]
            struct Line<'a> {
                record: &'static str,
                scenario: &'a str,
                #[serde(flatten)]
                outcome: &'a CheckOutcome,
            }
            out.push_str(&serde_json::to_string(&Line {
                record: "check",
                scenario: &self.name,
                outcome: o,
            })?);
            out.push('\n');
        }
        let tail = json!({
            "record": "summary",
            "scenario": self.name,
            "checks": self.outcomes.len(),
            "failures": self.failures(),
            "exit_code": self.exit_code(),
        });
        out.push_str(&serde_json::to_string(&tail)?);
        out.push('\n');
        Ok(out)
    }

    /// Writes `report.jsonl` and one CSV per series into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(REPORT_FILE), self.jsonl()?)?;
        for o in &self.outcomes {
            for s in &o.series {
                write_series(&dir.join(format!("{}.csv", s.name)), s)?;
            }
        }
        Ok(())
    }

    pub fn table(&self) -> String {
        let mut lines = vec![format!(
            "{:<26} {:<10} {:>22} {:>10} {:>9}",
            "check", "verdict", "value", "tolerance", "ms"
        )];
        for (o, d) in self.outcomes.iter().zip(&self.timings) {
            let verdict = match o.verdict {
                Verdict::Pass => "pass",
                Verdict::Violation => "VIOLATION",
                Verdict::Diverged => "diverged",
                Verdict::Probe => "probe",
            };
            lines.push(format!(
                "{:<26} {:<10} {:>22.15e} {:>10.1e} {:>9}",
                o.check,
                verdict,
                o.value,
                o.tolerance,
                d.as_millis()
            ));
            if let Some(detail) = &o.detail {
                lines.push(format!("    {detail}"));
            }
        }
        lines.push(format!("exit code {}", self.exit_code()));
        lines.join("\n") + "\n"
    }
}

/// CSV with header `(key, column, tolerance)`, rows in ascending key order.
pub fn write_series(path: &Path, s: &Series) -> Result<(), CliError> {
    let mut rows = s.rows.clone();
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?));
    w.write_record([s.key.as_str(), s.column.as_str(), "tolerance"])?;
    for (k, v) in rows {
        w.write_record([k.to_string(), v.to_string(), s.tolerance.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Any serialisable rows as CSV with a header from the field names.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(File::create(path)?));
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    let mut f = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    f.flush()?;
    Ok(())
}
