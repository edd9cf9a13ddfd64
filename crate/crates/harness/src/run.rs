//! Dispatch from a validated configuration to the module runners, and
//! assembly of the report.

use std::time::Instant;

use crate::config::{ExperimentConfig, Module};
use crate::error::Result;
use crate::report::{Clock, Num, Provenance, SolveReport, Table, Verdict};
use crate::{compare, oned, pipe3d};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a runner hands back before provenance is attached.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub series: Vec<Table>,
    pub contraction: Vec<Table>,
    pub monitors: Vec<Table>,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
    pub runtime_limit: Option<f64>,
}

/// Runs the experiment described by `cfg`. The module must be set.
pub fn run(cfg: &ExperimentConfig, seed: u64) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let out = match cfg.module() {
        Module::Transport1d => oned::transport1d(cfg)?,
        Module::Hyp1d => oned::hyp1d(cfg)?,
        Module::Pipe3d => pipe3d::pipe3d(cfg)?,
        Module::Divcurl => pipe3d::divcurl(cfg)?,
        Module::Trace => pipe3d::trace(cfg, seed)?,
        Module::Compare => compare::compare_files(cfg)?,
        Module::Suite => crate::acceptance::suite(cfg, seed)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    Ok(assemble(cfg, seed, out, elapsed))
}

pub fn assemble(cfg: &ExperimentConfig, seed: u64, out: Outcome, elapsed: f64) -> SolveReport {
    SolveReport {
        module: cfg.module().name().into(),
        preset: cfg.preset.clone(),
        series: out.series,
        contraction: out.contraction,
        monitors: out.monitors,
        tables: out.tables,
        verdicts: out.verdicts,
        provenance: Provenance {
            config_hash: cfg.hash(seed),
            code_version: CODE_VERSION.into(),
            seed,
            clock: Clock {
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
                elapsed_seconds: Num(elapsed),
                runtime_limit_seconds: out.runtime_limit.map(Num),
                within_runtime_limit: out.runtime_limit.is_none_or(|l| elapsed <= l),
            },
        },
    }
}

pub(crate) fn grids_or(cfg: &ExperimentConfig, default: &[usize]) -> Vec<usize> {
    cfg.grids.clone().unwrap_or_else(|| default.to_vec())
}
