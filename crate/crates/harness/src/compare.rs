//! Differences between two reports of the same module and preset.
//!
//! Tables are paired by name, ignoring a trailing grid tag `_n<size>`, so a
//! coarse and a fine run of the same preset line up. Rows are paired by
//! their first column (time, level, grid size) and every other shared
//! column gets its largest absolute gap and that gap relative to the peak
//! of the second report.

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::{Check, SolveReport, Table, Verdict};
use crate::run::Outcome;

fn family(name: &str) -> &str {
    if let Some(i) = name.rfind("_n") {
        let tag = &name[i + 2..];
        if !tag.is_empty() && tag.bytes().all(|b| b.is_ascii_digit()) {
            return &name[..i];
        }
    }
    name
}

fn unique_table<'a>(report: &'a SolveReport, key: &str) -> Option<&'a Table> {
    let mut it = report.all_tables().filter(|t| family(&t.name) == key);
    let first = it.next()?;
    if it.next().is_some() {
        // several grids in one report: pair the finest, which comes last
        return report.all_tables().filter(|t| family(&t.name) == key).last();
    }
    Some(first)
}

fn same_key(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDiff {
    pub table: String,
    pub column: String,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub matched_rows: usize,
}

pub fn diff_reports(a: &SolveReport, b: &SolveReport) -> Result<(Vec<ColumnDiff>, Table)> {
    if a.module != b.module || a.preset != b.preset {
        return Err(HarnessError::Schema(format!(
            "cannot compare {}/{} with {}/{}",
            a.module, a.preset, b.module, b.preset
        )));
    }
    let mut keys: Vec<&str> = Vec::new();
    for t in a.all_tables() {
        let k = family(&t.name);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut diffs = Vec::new();
    for key in keys {
        let (Some(ta), Some(tb)) = (unique_table(a, key), unique_table(b, key)) else {
            continue;
        };
        if ta.columns.is_empty() || ta.columns[0] != tb.columns[0] {
            return Err(HarnessError::Schema(format!("table `{key}` has different key columns")));
        }
        let labeled = !ta.labels.is_empty();
        // pair rows by label when present, otherwise by the first column
        let mut pairs = Vec::new();
        for (i, ra) in ta.rows.iter().enumerate() {
            let j = if labeled {
                tb.labels.iter().position(|l| *l == ta.labels[i])
            } else {
                tb.rows.iter().position(|rb| same_key(ra[0].0, rb[0].0))
            };
            if let Some(j) = j {
                pairs.push((i, j));
            }
        }
        let start = if labeled { 0 } else { 1 };
        for (ca, col) in ta.columns.iter().enumerate().skip(start) {
            let Some(cb) = tb.columns.iter().position(|c| c == col) else { continue };
            let (mut gap, mut peak) = (0.0f64, 0.0f64);
            for &(i, j) in &pairs {
                let (x, y) = (ta.rows[i][ca].0, tb.rows[j][cb].0);
                if x.is_nan() && y.is_nan() {
                    continue;
                }
                gap = gap.max((x - y).abs());
                peak = peak.max(y.abs());
            }
            let rel = if peak > 0.0 { gap / peak } else { gap };
            diffs.push(ColumnDiff {
                table: key.to_string(),
                column: col.clone(),
                abs_diff: gap,
                rel_diff: rel,
                matched_rows: pairs.len(),
            });
        }
    }
    let mut deltas = Table::new("verdict_deltas", &["passed_a", "passed_b"]);
    for va in &a.verdicts {
        if let Some(vb) = b.verdicts.iter().find(|v| v.criterion == va.criterion) {
            deltas.push_labeled(va.criterion.clone(), &[va.passed as u8 as f64, vb.passed as u8 as f64]);
        }
    }
    Ok((diffs, deltas))
}

pub fn compare(a: &SolveReport, b: &SolveReport, tolerance: Option<f64>, columns: Option<&[String]>) -> Result<Outcome> {
    let (diffs, deltas) = diff_reports(a, b)?;
    let mut table = Table::new("differences", &["abs_diff", "rel_diff", "matched_rows"]);
    for d in &diffs {
        table.push_labeled(format!("{}:{}", d.table, d.column), &[d.abs_diff, d.rel_diff, d.matched_rows as f64]);
    }
    let mut verdicts = Vec::new();
    if let Some(tol) = tolerance {
        // resolution doubling is part of the Burgers and pipe criteria
        let id = match a.module.as_str() {
            "hyp1d" => Some(4),
            "pipe3d" => Some(8),
            _ => None,
        };
        if let Some(id) = id {
            let selected = |d: &&ColumnDiff| {
                columns.is_none_or(|cs| cs.iter().any(|c| *c == d.column || *c == format!("{}:{}", d.table, d.column)))
            };
            let worst = diffs.iter().filter(selected).map(|d| d.rel_diff).fold(0.0f64, f64::max);
            verdicts.push(Verdict::new(id, "resolution comparison", vec![Check::at_most("max_rel_diff", worst, tol)]));
        }
    }
    Ok(Outcome { tables: vec![table, deltas], verdicts, ..Outcome::default() })
}

pub fn compare_files(cfg: &ExperimentConfig) -> Result<Outcome> {
    let a = SolveReport::load(cfg.report_a.as_ref().expect("validated"))?;
    let b = SolveReport::load(cfg.report_b.as_ref().expect("validated"))?;
    compare(&a, &b, cfg.tolerance, cfg.columns.as_deref())
}
