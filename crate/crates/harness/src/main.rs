use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use inflow_harness::error::HarnessError;
use inflow_harness::report::write_atomic;
use inflow_harness::{run, ExperimentConfig, Module};

#[derive(Parser)]
#[command(name = "inflow", version, about = "Run inflow-boundary solver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized parts; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Scalar transport on [-1, 1].
    Transport1d(Common),
    /// Quasilinear hyperbolic systems on [-1, 1].
    Hyp1d(Common),
    /// Coupled perturbation problem in the square pipe.
    Pipe3d(Common),
    /// Manufactured div-curl verification.
    Divcurl(Common),
    /// Wall invariance of characteristics.
    Trace(Common),
    /// Differences between two reports.
    Compare(Common),
    /// All acceptance criteria.
    Suite(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (module, common) = match cli.command {
        Command::Transport1d(c) => (Module::Transport1d, c),
        Command::Hyp1d(c) => (Module::Hyp1d, c),
        Command::Pipe3d(c) => (Module::Pipe3d, c),
        Command::Divcurl(c) => (Module::Divcurl, c),
        Command::Trace(c) => (Module::Trace, c),
        Command::Compare(c) => (Module::Compare, c),
        Command::Suite(c) => (Module::Suite, c),
    };
    let mut out_dir = common.out.clone();
    match execute(module, &common, &mut out_dir) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let record = serde_json::to_string_pretty(&serde_json::json!({ "error": e.to_record() }))
                .expect("error record serializes");
            if let Some(dir) = out_dir {
                if std::fs::create_dir_all(&dir).is_ok() {
                    let _ = write_atomic(&dir.join("error.json"), record.as_bytes());
                }
            }
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(module: Module, common: &Common, out_dir: &mut Option<PathBuf>) -> Result<u8, HarnessError> {
    let cfg = ExperimentConfig::load(&common.config)?;
    let cfg = cfg.bind(module)?;
    let seed = common.seed.or(cfg.seed).unwrap_or(0);
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| Path::new("results").join(format!("{}-{}", module.name(), cfg.preset)));
    *out_dir = Some(dir.clone());
    let report = run(&cfg, seed)?;
    report.write(&dir)?;
    for v in &report.verdicts {
        let status = if v.passed { "PASS" } else { "FAIL" };
        println!("{} {status} {}", v.criterion, v.title);
        for c in v.checks.iter().filter(|c| !c.passed) {
            println!("  {} = {:.4e} (limit {:.4e})", c.name, c.value.0, c.limit.0);
        }
    }
    let clock = &report.provenance.clock;
    if !clock.within_runtime_limit {
        println!(
            "runtime {:.1}s exceeds {:.1}s",
            clock.elapsed_seconds.0,
            clock.runtime_limit_seconds.map_or(f64::NAN, |l| l.0)
        );
    }
    println!("report written to {}", dir.display());
    Ok(if report.passed() { 0 } else { 1 })
}
