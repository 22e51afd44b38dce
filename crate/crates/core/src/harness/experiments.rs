//! Monte Carlo subspace-recovery experiments over parameter grids.

use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind};
use super::record::{sort_canonical, summarize, Algorithm, ExperimentRecord, SummaryRow};
use super::HarnessError;
use crate::datagen::{empirical_truth, generate_with, DataKind, DataSpec};
use crate::estimator::{exact_pca, run_csl, run_hmt_baseline, CslOptions, MeasurementMode};
use crate::linalg::subspace_distance;
use crate::par::{map_items, Execution};
use crate::randgen::mix64;

const ALGO_SALT: u64 = 0x5eed_a160_0000_0001;

/// One (grid point, trial) unit of work.
#[derive(Debug, Clone)]
struct Job {
    experiment: String,
    kind: DataKind,
    n: usize,
    d: usize,
    m: usize,
    k: usize,
    gamma: f64,
    trial: usize,
    algorithms: &'static [Algorithm],
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub experiment: ExperimentKind,
    /// Canonically sorted raw rows, one per (grid point, algorithm, trial).
    pub records: Vec<ExperimentRecord>,
    pub summary: Vec<SummaryRow>,
    pub warnings: Vec<String>,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of one trial, a function of the master seed, experiment id, grid
/// coordinates and trial index only.
pub fn trial_seed(master: u64, experiment: &str, coords: &[u64], trial: u64) -> u64 {
    let mut h = mix64(master ^ fnv1a(experiment));
    for &c in coords {
        h = mix64(h ^ c);
    }
    mix64(h ^ trial.wrapping_add(0x9e37_79b9_7f4a_7c15))
}

impl Job {
    fn seed(&self, master: u64) -> u64 {
        let coords = [
            self.n as u64,
            self.d as u64,
            self.m as u64,
            self.k as u64,
            self.gamma.to_bits(),
        ];
        trial_seed(master, &self.experiment, &coords, self.trial as u64)
    }
}

fn spectrum_for(cfg: &ExperimentConfig, kind: DataKind, d: usize, k: usize, gamma: f64) -> Vec<f64> {
    if let Some(s) = &cfg.spectrum {
        return s.clone();
    }
    let bulk = if kind == DataKind::Spiked { cfg.bulk } else { 0.0 };
    DataSpec::ladder_spectrum(d, k, gamma, bulk)
}

fn run_job(cfg: &ExperimentConfig, job: &Job) -> Result<(Vec<ExperimentRecord>, Option<String>), HarnessError> {
    let seed = job.seed(cfg.master_seed);
    let spec = DataSpec {
        d: job.d,
        n: job.n,
        k: job.k,
        kind: job.kind,
        spectrum: spectrum_for(cfg, job.kind, job.d, job.k, job.gamma),
        mu_cap: cfg.mu_cap,
        seed,
    };
    let data = generate_with(&spec, Execution::Sequential)?;
    let truth = empirical_truth(&data.x, job.k)?;
    let warning = truth.degenerate_gap.then(|| {
        format!(
            "{} trial {} (n={}, d={}, k={}): empirical eigengap {:e} is degenerate",
            job.experiment, job.trial, job.n, job.d, job.k, truth.gamma_k
        )
    });
    let opts = CslOptions {
        execution: Execution::Sequential,
        mode: if cfg.single_projection {
            MeasurementMode::Single
        } else {
            MeasurementMode::Paired
        },
    };
    let algo_seed = mix64(seed ^ ALGO_SALT);

    let mut out = Vec::with_capacity(job.algorithms.len());
    for &alg in job.algorithms {
        let start = Instant::now();
        let est = match alg {
            Algorithm::Csl => run_csl(&data.x, job.m, job.k, algo_seed, opts)?,
            Algorithm::Hmt => run_hmt_baseline(&data.x, job.m, job.k, algo_seed, Execution::Sequential)?,
            Algorithm::Exact => exact_pca(&data.x, job.k)?,
        };
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let error = subspace_distance(&est.projector, &truth.projector)?;
        out.push(
            ExperimentRecord {
                experiment: job.experiment.clone(),
                algorithm: alg,
                trial: job.trial,
                seed,
                n: job.n,
                d: job.d,
                m: if alg == Algorithm::Exact { job.d } else { job.m },
                k: job.k,
                gamma_k: truth.gamma_k,
                mu: truth.mu,
                error: 0.0,
                rescaled_error: 0.0,
                wall_time_ms: if cfg.record_timing { elapsed } else { 0.0 },
                gamma_param: job.gamma,
            }
            .with_error(error),
        );
    }
    Ok((out, warning))
}

fn jobs_for(cfg: &ExperimentConfig, exp: ExperimentKind) -> Vec<Job> {
    let mut jobs = Vec::new();
    let mut push = |experiment: &str, kind, n, d, m, k, gamma, algorithms| {
        for trial in 0..cfg.trials {
            jobs.push(Job {
                experiment: experiment.to_string(),
                kind,
                n,
                d,
                m,
                k,
                gamma,
                trial,
                algorithms,
            });
        }
    };
    const CSL: &[Algorithm] = &[Algorithm::Csl];
    const BOTH: &[Algorithm] = &[Algorithm::Csl, Algorithm::Hmt];
    let (d, n, k, m, g) = (cfg.d, cfg.n, cfg.k, cfg.m, cfg.gamma);
    for kind in cfg.kinds_for(exp) {
        match exp {
            ExperimentKind::CompareHmt => {
                for &n in &cfg.n_grid {
                    for &m in &cfg.m_grid {
                        push(exp.as_str(), kind, n, d, m, k, g, BOTH);
                    }
                }
            }
            ExperimentKind::Convergence => {
                let id = format!("convergence_{kind}");
                for &n in &cfg.n_grid {
                    push(&id, kind, n, d, m, k, g, CSL);
                }
            }
            ExperimentKind::SweepM => {
                for &m in &cfg.m_grid {
                    push(exp.as_str(), kind, n, d, m, k, g, CSL);
                }
            }
            ExperimentKind::SweepD => {
                for &d in &cfg.d_grid {
                    push(exp.as_str(), kind, n, d, m, k, g, CSL);
                }
            }
            ExperimentKind::SweepK => {
                for &k in &cfg.k_grid {
                    push(exp.as_str(), kind, n, d, m, k, g, CSL);
                }
            }
            ExperimentKind::SweepGamma => {
                for &g in &cfg.gamma_grid {
                    push(exp.as_str(), kind, n, d, m, k, g, CSL);
                }
            }
            _ => {}
        }
    }
    jobs
}

/// Runs one of the record-producing experiments (`compare_hmt`,
/// `convergence`, `sweep_*`).
pub fn run_records(cfg: &ExperimentConfig, exp: ExperimentKind) -> Result<ExperimentOutput, HarnessError> {
    cfg.validate_for(exp)?;
    let jobs = jobs_for(cfg, exp);
    if jobs.is_empty() {
        return Err(HarnessError::Config(format!("{} does not produce records", exp.command_name())));
    }
    let exec = if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let results = map_items(jobs, exec, |job| run_job(cfg, &job));
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for r in results {
        let (rows, warning) = r?;
        records.extend(rows);
        warnings.extend(warning);
    }
    sort_canonical(&mut records);
    let summary = summarize(&records);
    Ok(ExperimentOutput {
        experiment: exp,
        records,
        summary,
        warnings,
    })
}

pub fn run_compare_hmt(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    run_records(cfg, ExperimentKind::CompareHmt)
}

pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    run_records(cfg, ExperimentKind::Convergence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    M,
    D,
    K,
    Gamma,
}

impl SweepAxis {
    pub fn experiment(self) -> ExperimentKind {
        match self {
            SweepAxis::M => ExperimentKind::SweepM,
            SweepAxis::D => ExperimentKind::SweepD,
            SweepAxis::K => ExperimentKind::SweepK,
            SweepAxis::Gamma => ExperimentKind::SweepGamma,
        }
    }
}

pub fn run_sweep(cfg: &ExperimentConfig, axis: SweepAxis) -> Result<ExperimentOutput, HarnessError> {
    run_records(cfg, axis.experiment())
}
