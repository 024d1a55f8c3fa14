//! JSONL, CSV and markdown renderings of a record list.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::check::{CheckRecord, Status};
use crate::error::Result;

use super::VERSION;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub suite: String,
    pub version: String,
    pub config_hash: String,
    pub records: usize,
}

impl ReportHeader {
    pub fn new(suite: &str, config_hash: &str, records: usize) -> Self {
        Self { suite: suite.to_string(), version: VERSION.to_string(), config_hash: config_hash.to_string(), records }
    }
}

/// Header line, then one record per line, FAIL rows first.
pub fn write_jsonl(out: &mut impl Write, header: &ReportHeader, records: &[CheckRecord]) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string(header)?)?;
    for r in sorted(records) {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

const CSV_COLUMNS: [&str; 11] = [
    "check_id",
    "instance",
    "detail",
    "epsilon",
    "lhs",
    "rhs_explicit",
    "residual",
    "residual_ratio",
    "ceiling",
    "status",
    "runtime_ms",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// A comment line with version and config hash, the column header, then rows.
pub fn write_csv(out: &mut impl Write, header: &ReportHeader, records: &[CheckRecord]) -> Result<()> {
    writeln!(out, "# suite={} version={} config_hash={}", header.suite, header.version, header.config_hash)?;
    writeln!(out, "{}", CSV_COLUMNS.join(","))?;
    for r in sorted(records) {
        let row = [
            csv_field(&r.check_id),
            csv_field(&r.instance),
            csv_field(&r.detail),
            format!("{:e}", r.epsilon),
            format!("{:e}", r.lhs),
            format!("{:e}", r.rhs_explicit),
            format!("{:e}", r.residual),
            opt(r.residual_ratio),
            opt(r.ceiling),
            r.status.to_string(),
            format!("{:.3}", r.runtime_ms),
        ];
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Per-check summary table followed by every FAIL row.
pub fn write_markdown(out: &mut impl Write, header: &ReportHeader, records: &[CheckRecord]) -> Result<()> {
    writeln!(out, "# Suite `{}`\n", header.suite)?;
    writeln!(out, "version {}, config {}, {} records\n", header.version, header.config_hash, header.records)?;
    writeln!(out, "| check | PASS | REPORT | FAIL | max residual ratio |")?;
    writeln!(out, "|---|---|---|---|---|")?;
    let mut by_id: BTreeMap<&str, (usize, usize, usize, Option<f64>)> = BTreeMap::new();
    for r in records {
        let e = by_id.entry(&r.check_id).or_default();
        match r.status {
            Status::Pass => e.0 += 1,
            Status::Report => e.1 += 1,
            Status::Fail => e.2 += 1,
        }
        if let Some(q) = r.residual_ratio {
            e.3 = Some(e.3.map_or(q, |m: f64| m.max(q)));
        }
    }
    for (id, (p, rep, f, q)) in &by_id {
        writeln!(
            out,
            "| {id} | {p} | {rep} | {f} | {} |",
            q.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into())
        )?;
    }
    let fails: Vec<&CheckRecord> = sorted(records).into_iter().filter(|r| r.failed()).collect();
    if !fails.is_empty() {
        writeln!(out, "\n## Failures\n")?;
        for r in fails {
            writeln!(
                out,
                "- `{}` {} {}: lhs {:e} > rhs {:e}",
                r.check_id, r.instance, r.detail, r.lhs, r.rhs_explicit
            )?;
        }
    }
    Ok(())
}

fn sorted(records: &[CheckRecord]) -> Vec<&CheckRecord> {
    let mut v: Vec<&CheckRecord> = records.iter().collect();
    v.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    v
}
