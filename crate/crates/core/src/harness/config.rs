//! Experiment configuration, read from TOML.
//!
//! Every key is optional and unknown keys are rejected. Example:
//!
//! ```toml
//! kind = "rank1_identical"
//! d = 20
//! k = 1
//! n_grid = [1000, 10000]
//! m_grid = [2]
//! trials = 20
//! master_seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use super::HarnessError;
use crate::datagen::DataKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CompareHmt,
    Convergence,
    SweepM,
    SweepD,
    SweepK,
    SweepGamma,
    MomentsCheck,
    CostReport,
    ExportData,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::CompareHmt => "compare_hmt",
            ExperimentKind::Convergence => "convergence",
            ExperimentKind::SweepM => "sweep_m",
            ExperimentKind::SweepD => "sweep_d",
            ExperimentKind::SweepK => "sweep_k",
            ExperimentKind::SweepGamma => "sweep_gamma",
            ExperimentKind::MomentsCheck => "moments_check",
            ExperimentKind::CostReport => "cost_report",
            ExperimentKind::ExportData => "export_data",
        }
    }

    /// Subcommand spelling, e.g. `sweep-gamma`.
    pub fn command_name(self) -> String {
        self.as_str().replace('_', "-")
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        let v = toml::Value::String(s.replace('-', "_"));
        ExperimentKind::deserialize(v).map_err(|_| HarnessError::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Must match the subcommand when given.
    pub experiment: Option<ExperimentKind>,
    /// Data kind; defaults per experiment (see [`ExperimentConfig::kinds_for`]).
    pub kind: Option<DataKind>,
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// Eigengap of the generated spectrum.
    pub gamma: f64,
    /// Isotropic bulk level for spiked data.
    pub bulk: f64,
    /// Explicit spectrum, overriding `gamma`/`bulk`; length must equal `d`.
    pub spectrum: Option<Vec<f64>>,
    pub mu_cap: f64,
    pub n_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    pub d_grid: Vec<usize>,
    pub k_grid: Vec<usize>,
    pub gamma_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    /// Monte Carlo budget for `moments_check`.
    pub draws: usize,
    /// Column count for the variance check in `moments_check`.
    pub columns: usize,
    /// Measure each column with one projection (`z ≡ y`).
    pub single_projection: bool,
    /// Write real `wall_time_ms`; output is then no longer byte-reproducible.
    pub record_timing: bool,
    /// Run trials on the calling thread only.
    pub sequential: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            kind: None,
            d: 20,
            n: 5000,
            k: 2,
            m: 4,
            gamma: 1.0,
            bulk: 0.25,
            spectrum: None,
            mu_cap: 1.0,
            n_grid: vec![250, 500, 1000, 2500, 5000, 10_000],
            m_grid: vec![2, 4],
            d_grid: vec![10, 20, 40],
            k_grid: vec![1, 2, 3, 4],
            gamma_grid: vec![0.25, 0.5, 1.0, 2.0],
            trials: 20,
            master_seed: 0,
            output_path: None,
            draws: 1_000_000,
            columns: 50,
            single_projection: false,
            record_timing: false,
            sequential: false,
        }
    }
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn check_grid<T: PartialOrd + Copy + fmt::Debug>(name: &str, grid: &[T]) -> Result<(), HarnessError> {
    if grid.is_empty() {
        return Err(config_err(format!("{name} must be nonempty")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(config_err(format!("{name} must be strictly ascending, got {grid:?}")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Data kinds an experiment runs over.
    pub fn kinds_for(&self, exp: ExperimentKind) -> Vec<DataKind> {
        if let Some(kind) = self.kind {
            return vec![kind];
        }
        match exp {
            ExperimentKind::Convergence => vec![DataKind::ExactLowRank, DataKind::Spiked],
            ExperimentKind::SweepM
            | ExperimentKind::SweepD
            | ExperimentKind::SweepK
            | ExperimentKind::SweepGamma => vec![DataKind::Spiked],
            _ => vec![DataKind::ExactLowRank],
        }
    }

    fn check_shape(&self, d: usize, k: usize, m: usize, kind: DataKind) -> Result<(), HarnessError> {
        if d < 2 {
            return Err(config_err(format!("d = {d} must be at least 2")));
        }
        if k == 0 || k >= d {
            return Err(config_err(format!("k = {k} must satisfy 1 <= k < d = {d}")));
        }
        if m == 0 || m > d {
            return Err(config_err(format!("m = {m} must satisfy 1 <= m <= d = {d}")));
        }
        if kind == DataKind::Rank1Identical && k != 1 {
            return Err(config_err("rank1_identical data requires k = 1"));
        }
        if let Some(s) = &self.spectrum {
            if s.len() != d {
                return Err(config_err(format!("spectrum has {} entries but d = {d}", s.len())));
            }
        }
        Ok(())
    }

    /// Checks everything `exp` depends on; failures exit with code 2.
    pub fn validate_for(&self, exp: ExperimentKind) -> Result<(), HarnessError> {
        if let Some(e) = self.experiment {
            if e != exp {
                return Err(config_err(format!(
                    "config declares experiment {e} but {} was requested",
                    exp.command_name()
                )));
            }
        }
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if self.n == 0 {
            return Err(config_err("n must be positive"));
        }
        if !(self.gamma > 0.0) || !(self.bulk >= 0.0) || !(self.mu_cap > 0.0) {
            return Err(config_err("gamma and mu_cap must be positive, bulk nonnegative"));
        }
        let kinds = self.kinds_for(exp);
        let shape_all = |ds: &[usize], ks: &[usize], ms: &[usize]| -> Result<(), HarnessError> {
            for &kind in &kinds {
                for &d in ds {
                    for &k in ks {
                        for &m in ms {
                            self.check_shape(d, k, m, kind)?;
                        }
                    }
                }
            }
            Ok(())
        };
        match exp {
            ExperimentKind::CompareHmt => {
                check_grid("n_grid", &self.n_grid)?;
                check_grid("m_grid", &self.m_grid)?;
                shape_all(&[self.d], &[self.k], &self.m_grid)
            }
            ExperimentKind::Convergence => {
                check_grid("n_grid", &self.n_grid)?;
                shape_all(&[self.d], &[self.k], &[self.m])
            }
            ExperimentKind::SweepM => {
                check_grid("m_grid", &self.m_grid)?;
                shape_all(&[self.d], &[self.k], &self.m_grid)
            }
            ExperimentKind::SweepD => {
                check_grid("d_grid", &self.d_grid)?;
                if self.spectrum.is_some() {
                    return Err(config_err("an explicit spectrum cannot be combined with sweep_d"));
                }
                shape_all(&self.d_grid, &[self.k], &[self.m])
            }
            ExperimentKind::SweepK => {
                check_grid("k_grid", &self.k_grid)?;
                if self.spectrum.is_some() {
                    return Err(config_err("an explicit spectrum cannot be combined with sweep_k"));
                }
                shape_all(&[self.d], &self.k_grid, &[self.m])
            }
            ExperimentKind::SweepGamma => {
                check_grid("gamma_grid", &self.gamma_grid)?;
                if self.gamma_grid[0] <= 0.0 {
                    return Err(config_err("gamma_grid entries must be positive"));
                }
                if self.spectrum.is_some() {
                    return Err(config_err("an explicit spectrum cannot be combined with sweep_gamma"));
                }
                shape_all(&[self.d], &[self.k], &[self.m])
            }
            ExperimentKind::MomentsCheck => {
                if self.m == 0 || self.m >= self.d {
                    return Err(config_err(format!(
                        "moments_check needs 1 <= m < d, got m = {}, d = {}",
                        self.m, self.d
                    )));
                }
                if self.draws < 2 || self.columns == 0 {
                    return Err(config_err("draws must be >= 2 and columns >= 1"));
                }
                Ok(())
            }
            ExperimentKind::CostReport => {
                if self.m == 0 || self.m > self.d {
                    return Err(config_err("cost_report needs 1 <= m <= d"));
                }
                Ok(())
            }
            ExperimentKind::ExportData => shape_all(&[self.d], &[self.k], &[self.m]),
        }
    }
}
