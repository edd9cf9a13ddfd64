//! The acceptance criteria as runnable presets.
//!
//! Each criterion maps to one preset run at its acceptance settings. The
//! verdict of that run, plus a check on the wall-clock budget, decides the
//! criterion.

use crate::config::{ExperimentConfig, Module};
use crate::error::Result;
use crate::report::{Check, SolveReport, Table, Verdict};
use crate::run::{run, Outcome};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// The preset run that evaluates criterion `id`.
pub fn criterion_config(id: u8) -> ExperimentConfig {
    let (module, preset) = match id {
        1 => (Module::Transport1d, "translation"),
        2 => (Module::Transport1d, "flush-test"),
        3 | 4 => (Module::Hyp1d, "burgers-small"),
        5 => (Module::Hyp1d, "shock-contrast"),
        6 => (Module::Trace, "lateral-invariance"),
        7 => (Module::Divcurl, "manufactured"),
        8 => (Module::Pipe3d, "product-cosine"),
        9 => (Module::Pipe3d, "compat-vectors"),
        _ => panic!("no criterion {id}"),
    };
    let mut cfg = ExperimentConfig::new(module, preset);
    if id == 3 {
        // the contraction criterion is timed on the single N = 256 run
        cfg.grids = Some(vec![256]);
    }
    cfg
}

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub verdict: Verdict,
    pub elapsed_seconds: f64,
    pub report: SolveReport,
}

impl CriterionOutcome {
    /// `criterion N: PASS|FAIL title (failed checks)`.
    pub fn line(&self) -> String {
        let status = if self.verdict.passed { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {}: {status} {} [{:.1}s]", self.id, self.verdict.title, self.elapsed_seconds);
        let failed = self.verdict.failed_checks();
        if !failed.is_empty() {
            let detail: Vec<String> = self
                .verdict
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{} = {:.3e} vs {:.3e}", c.name, c.value.0, c.limit.0))
                .collect();
            s.push_str(&format!(" ({})", detail.join("; ")));
        }
        s
    }
}

pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionOutcome> {
    let cfg = criterion_config(id);
    let report = run(&cfg, seed)?;
    let tag = format!("C{id}");
    let mut verdict = report
        .verdicts
        .iter()
        .find(|v| v.criterion == tag)
        .cloned()
        .unwrap_or_else(|| Verdict::new(id, "missing verdict", vec![Check::holds("verdict_present", false)]));
    let clock = &report.provenance.clock;
    let elapsed = clock.elapsed_seconds.0;
    if let Some(limit) = clock.runtime_limit_seconds {
        verdict.checks.push(Check::at_most("runtime_seconds", elapsed, limit.0));
        verdict.passed = verdict.checks.iter().all(|c| c.passed);
    }
    Ok(CriterionOutcome { id, verdict, elapsed_seconds: elapsed, report })
}

/// Runs the selected criteria in order and gathers their verdicts and
/// tables, each table prefixed by its criterion.
pub fn suite(cfg: &ExperimentConfig, seed: u64) -> Result<Outcome> {
    let ids = cfg.criteria.clone().unwrap_or_else(|| CRITERIA.to_vec());
    let mut out = Outcome::default();
    let mut summary = Table::new("criteria", &["passed", "elapsed_seconds"]);
    for id in ids {
        let c = run_criterion(id, seed)?;
        summary.push_labeled(format!("C{id}"), &[c.verdict.passed as u8 as f64, c.elapsed_seconds]);
        let prefix = |mut t: Table| {
            t.name = format!("c{id}_{}", t.name);
            t
        };
        out.series.extend(c.report.series.into_iter().map(prefix));
        out.contraction.extend(c.report.contraction.into_iter().map(prefix));
        out.monitors.extend(c.report.monitors.into_iter().map(prefix));
        out.tables.extend(c.report.tables.into_iter().map(prefix));
        out.verdicts.push(c.verdict);
    }
    out.tables.push(summary);
    Ok(out)
}
