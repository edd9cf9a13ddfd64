//! Report schema and its persistence.
//!
//! Reports are plain data with fields in a fixed order, so serialization is
//! deterministic. Non-finite numbers are written as the strings `"inf"`,
//! `"-inf"` and `"nan"` to keep the JSON valid and the round trip exact.
//! Everything that depends on the wall clock lives in [`Clock`].

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{HarnessError, Result};

/// A float that survives a JSON round trip bit for bit.
#[derive(Debug, Clone, Copy, Default)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || (self.0.is_nan() && other.0.is_nan())
    }
}

impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num(x)
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct NumVisitor;
        impl Visitor<'_> for NumVisitor {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Num, E> {
                match v {
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    "nan" => Ok(Num(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(NumVisitor)
    }
}

/// A named table with a header row; time series put `t` first. Tables
/// whose rows are named carry one label per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub labels: Vec<String>,
    pub rows: Vec<Vec<Num>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            labels: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: &[f64]) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row.iter().map(|&x| Num(x)).collect());
    }

    pub fn push_labeled(&mut self, label: impl Into<String>, row: &[f64]) {
        self.labels.push(label.into());
        self.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j].0).collect())
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| HarnessError::Io(std::io::Error::other(e));
        let labeled = !self.labels.is_empty();
        let mut header = Vec::new();
        if labeled {
            header.push("label".to_string());
        }
        header.extend(self.columns.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = Vec::with_capacity(header.len());
            if labeled {
                rec.push(self.labels[i].clone());
            }
            rec.extend(row.iter().map(|x| format_num(x.0)));
            w.write_record(&rec).map_err(io)?;
        }
        w.into_inner().map_err(|e| HarnessError::Io(std::io::Error::other(e.to_string())))
    }
}

fn format_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        // shortest representation that parses back to the same value
        format!("{x:?}")
    }
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: Num,
    pub limit: Num,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value: Num(value), limit: Num(limit), passed: value <= limit }
    }

    /// Passes when `value >= limit`.
    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value: Num(value), limit: Num(limit), passed: value >= limit }
    }

    /// Passes when `lo <= value <= hi`; the limit records the violated side.
    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        let limit = if value < lo { lo } else { hi };
        Self { name: name.into(), value: Num(value), limit: Num(limit), passed: (lo..=hi).contains(&value) }
    }

    /// A yes/no property, recorded as 1 or 0 against 1.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: Num(if ok { 1.0 } else { 0.0 }), limit: Num(1.0), passed: ok }
    }
}

/// The outcome of evaluating one acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    /// `C1` to `C9`.
    pub criterion: String,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    pub fn new(id: u8, title: &str, checks: Vec<Check>) -> Self {
        Self { criterion: format!("C{id}"), title: title.into(), passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Wall-clock data, the only part of a report that varies between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clock {
    pub timestamp: String,
    pub elapsed_seconds: Num,
    pub runtime_limit_seconds: Option<Num>,
    pub within_runtime_limit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the normalized configuration.
    pub config_hash: String,
    pub code_version: String,
    pub seed: u64,
    pub clock: Clock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub module: String,
    pub preset: String,
    /// Norm time series.
    pub series: Vec<Table>,
    /// Iteration distances and ratios.
    pub contraction: Vec<Table>,
    /// Monitor residuals against their tolerances.
    pub monitors: Vec<Table>,
    /// Anything else, such as refinement tables.
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub provenance: Provenance,
}

impl SolveReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed) && self.provenance.clock.within_runtime_limit
    }

    pub fn all_tables(&self) -> impl Iterator<Item = &Table> {
        self.series.iter().chain(&self.contraction).chain(&self.monitors).chain(&self.tables)
    }

    pub fn find_table(&self, name: &str) -> Option<&Table> {
        self.all_tables().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| HarnessError::Io(std::io::Error::other(e)))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| HarnessError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read report {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// JSON with the clock block blanked, for determinism comparisons.
    pub fn without_clock(&self) -> Self {
        let mut r = self.clone();
        r.provenance.clock = Clock {
            timestamp: String::new(),
            elapsed_seconds: Num(0.0),
            runtime_limit_seconds: None,
            within_runtime_limit: true,
        };
        r
    }

    /// Writes `report.json` and one CSV per table into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for t in self.all_tables() {
            write_atomic(&dir.join(format!("{}.csv", t.name)), &t.to_csv()?)?;
        }
        write_atomic(&dir.join("report.json"), self.to_json()?.as_bytes())
    }
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.error))?;
    Ok(())
}
