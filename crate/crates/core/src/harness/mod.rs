//! Experiment runner behind the `csl` binary.

pub mod config;
pub mod cost;
pub mod experiments;
pub mod moments;
pub mod plot;
pub mod record;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::datagen::{generate, write_matrix, DataKind, DataSpec};
use crate::error::CslError;

pub use config::{ExperimentConfig, ExperimentKind};
pub use cost::{run_cost_report, write_cost_report, CostRow};
pub use experiments::{run_compare_hmt, run_convergence, run_records, run_sweep, trial_seed, ExperimentOutput, SweepAxis};
pub use moments::{run_moments_check, CheckResult, MomentsReport};
pub use record::{write_csv, write_summary, Algorithm, ExperimentRecord, SummaryRow, CSV_HEADER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Numerical(#[from] CslError),
}

impl HarnessError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub enum RunOutput {
    Records(ExperimentOutput),
    Moments(MomentsReport),
    Cost(Vec<CostRow>),
    Matrix { text: String },
}

impl RunOutput {
    /// False only for a moments report with a failed check.
    pub fn passed(&self) -> bool {
        match self {
            RunOutput::Moments(r) => r.all_passed(),
            _ => true,
        }
    }

    pub fn warnings(&self) -> &[String] {
        match self {
            RunOutput::Records(o) => &o.warnings,
            _ => &[],
        }
    }
}

fn export_matrix(cfg: &ExperimentConfig) -> Result<String, HarnessError> {
    cfg.validate_for(ExperimentKind::ExportData)?;
    let kind = cfg.kind.unwrap_or(DataKind::ExactLowRank);
    let bulk = if kind == DataKind::Spiked { cfg.bulk } else { 0.0 };
    let spec = DataSpec {
        d: cfg.d,
        n: cfg.n,
        k: cfg.k,
        kind,
        spectrum: cfg
            .spectrum
            .clone()
            .unwrap_or_else(|| DataSpec::ladder_spectrum(cfg.d, cfg.k, cfg.gamma, bulk)),
        mu_cap: cfg.mu_cap,
        seed: cfg.master_seed,
    };
    spec.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
    let data = generate(&spec)?;
    let mut buf = Vec::new();
    write_matrix(&mut buf, &data.x, kind, cfg.master_seed)?;
    Ok(String::from_utf8(buf).expect("matrix text is ASCII"))
}

/// Runs `exp` against `cfg`.
pub fn run(cfg: &ExperimentConfig, exp: ExperimentKind) -> Result<RunOutput, HarnessError> {
    Ok(match exp {
        ExperimentKind::MomentsCheck => RunOutput::Moments(run_moments_check(cfg)?),
        ExperimentKind::CostReport => RunOutput::Cost(run_cost_report(cfg)?),
        ExperimentKind::ExportData => RunOutput::Matrix { text: export_matrix(cfg)? },
        _ => RunOutput::Records(run_records(cfg, exp)?),
    })
}

/// `out.csv` → `out.summary.csv`, `out` → `out.summary.csv`.
pub fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_primary<W: Write>(w: W, out: &RunOutput) -> io::Result<()> {
    let mut w = w;
    match out {
        RunOutput::Records(o) => write_csv(&mut w, &o.records)?,
        RunOutput::Moments(r) => r.write(&mut w)?,
        RunOutput::Cost(rows) => write_cost_report(&mut w, rows)?,
        RunOutput::Matrix { text } => w.write_all(text.as_bytes())?,
    }
    w.flush()
}

/// Writes the main CSV to `path` (stdout when `None`). Record sets written to
/// a file also get `<stem>.summary.csv` and a `<stem>.gp` plot script
/// drawing `<stem>.png`.
pub fn write_output(out: &RunOutput, path: Option<&Path>) -> Result<(), HarnessError> {
    let Some(path) = path else {
        return Ok(write_primary(io::stdout().lock(), out)?);
    };
    write_primary(BufWriter::new(File::create(path)?), out)?;
    if let RunOutput::Records(o) = out {
        let summary = sibling_path(path, "summary.csv");
        write_summary(BufWriter::new(File::create(&summary)?), &o.summary)?;
        let png = sibling_path(path, "png");
        let script = plot::gnuplot_script(&summary.to_string_lossy(), &png.to_string_lossy(), &o.summary);
        std::fs::write(sibling_path(path, "gp"), script)?;
    }
    Ok(())
}
