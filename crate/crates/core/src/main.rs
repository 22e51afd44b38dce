use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use csl::harness::{self, ExperimentConfig, ExperimentKind, HarnessError};

#[derive(Parser)]
#[command(name = "csl", version, about = "Compressive subspace learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `output_path`; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// CSL against the shared-projection baseline over n and m.
    CompareHmt(Common),
    /// Error and rescaled error over the n grid.
    Convergence(Common),
    /// Median error over the m grid.
    SweepM(Common),
    /// Median error over the d grid.
    SweepD(Common),
    /// Median error over the k grid.
    SweepK(Common),
    /// Median error over the eigengap grid.
    SweepGamma(Common),
    /// Monte Carlo check of the closed-form moments and bounds.
    MomentsCheck(Common),
    /// Measurement and communication costs per scheme.
    CostReport(Common),
    /// Write one generated data matrix as text.
    ExportData(Common),
}

impl Command {
    fn split(&self) -> (ExperimentKind, &Common) {
        match self {
            Command::CompareHmt(c) => (ExperimentKind::CompareHmt, c),
            Command::Convergence(c) => (ExperimentKind::Convergence, c),
            Command::SweepM(c) => (ExperimentKind::SweepM, c),
            Command::SweepD(c) => (ExperimentKind::SweepD, c),
            Command::SweepK(c) => (ExperimentKind::SweepK, c),
            Command::SweepGamma(c) => (ExperimentKind::SweepGamma, c),
            Command::MomentsCheck(c) => (ExperimentKind::MomentsCheck, c),
            Command::CostReport(c) => (ExperimentKind::CostReport, c),
            Command::ExportData(c) => (ExperimentKind::ExportData, c),
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, HarnessError> {
    let (exp, common) = cli.command.split();
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    let out = harness::run(&cfg, exp)?;
    for w in out.warnings() {
        eprintln!("warning: {w}");
    }
    let path = common.out.clone().or(cfg.output_path.clone());
    harness::write_output(&out, path.as_deref())?;
    if let harness::RunOutput::Moments(r) = &out {
        for c in r.checks.iter().filter(|c| !c.passed) {
            eprintln!(
                "check {} failed: {} = {:e}, tolerance {:e}",
                c.name, c.rule, c.deviation, c.tolerance
            );
        }
    }
    Ok(out.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
