//! Monte Carlo checks of the closed-form measurement moments and bounds.
//!
//! Every estimator here draws real projectors through
//! [`random_projection`], so it is independent of the Beta/sphere
//! decomposition the closed forms are derived from.

use std::io::{self, Write};

use super::config::{ExperimentConfig, ExperimentKind};
use super::record::{fmt_sig, CSV_SIG_DIGITS};
use super::HarnessError;
use crate::error::Result;
use crate::linalg::{dot, spectral_norm, DataMatrix, SymmetricMatrix};
use crate::par::{map_blocks, Execution, BLOCK_SIZE};
use crate::randgen::{beta_sample_with, mix64, random_projection, sphere_vector, BetaParams, SeedSpec, StreamRole};
use crate::theory::{
    expected_increment_square, moment_omega2, moment_yzyz, moment_yzzy, r_bound, variance_bound, ProblemParams,
};

/// Relative Frobenius tolerance for the fourth-moment matrices.
pub const FOURTH_MOMENT_REL_TOL: f64 = 0.05;
/// Standard errors allowed for the `E ω²` check.
pub const OMEGA2_SE_BAND: f64 = 4.0;
/// Draw budget for the almost-sure bound check.
pub const R_BOUND_DRAWS: usize = 100_000;

fn projected_pair(x: &[f64], i: u64, m: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = x.len();
    let y = random_projection(SeedSpec::for_column(seed, i, StreamRole::Phi), d, m)?.apply(x);
    let z = random_projection(SeedSpec::for_column(seed, i, StreamRole::Psi), d, m)?.apply(x);
    Ok((y, z))
}

/// Mean and standard error of `ω²` over `draws` chi-square-ratio samples.
pub fn mc_omega2(d: usize, m: usize, draws: usize, seed: u64, exec: Execution) -> Result<(f64, f64)> {
    let p = BetaParams::for_projection(d, m)?;
    let sums = map_blocks(draws, BLOCK_SIZE, exec, |range| {
        let (mut s1, mut s2) = (0.0, 0.0);
        for i in range {
            let w = beta_sample_with(&mut SeedSpec::for_column(seed, i as u64, StreamRole::Aux).rng(), p);
            let w2 = w * w;
            s1 += w2;
            s2 += w2 * w2;
        }
        (s1, s2)
    });
    let (s1, s2) = sums.into_iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = draws as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

/// Sample means of `y zᵀ y zᵀ` and `y zᵀ z yᵀ`, row-major `d × d`.
pub fn mc_fourth_moments(x: &[f64], m: usize, draws: usize, seed: u64, exec: Execution) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = x.len();
    let parts = map_blocks(draws, BLOCK_SIZE, exec, |range| {
        let mut yzyz = vec![0.0; d * d];
        let mut yzzy = vec![0.0; d * d];
        for i in range {
            let (y, z) = projected_pair(x, i as u64, m, seed)?;
            let zy = dot(&z, &y);
            let zz = dot(&z, &z);
            for r in 0..d {
                for c in 0..d {
                    // y zᵀ y zᵀ = (zᵀy) y zᵀ ; y zᵀ z yᵀ = ‖z‖² y yᵀ
                    yzyz[r * d + c] += zy * y[r] * z[c];
                    yzzy[r * d + c] += zz * y[r] * y[c];
                }
            }
        }
        Ok::<_, crate::error::CslError>((yzyz, yzzy))
    });
    let mut a = vec![0.0; d * d];
    let mut b = vec![0.0; d * d];
    for p in parts {
        let (pa, pb) = p?;
        a.iter_mut().zip(&pa).for_each(|(s, v)| *s += v);
        b.iter_mut().zip(&pb).for_each(|(s, v)| *s += v);
    }
    let inv = 1.0 / draws as f64;
    a.iter_mut().chain(b.iter_mut()).for_each(|v| *v *= inv);
    Ok((a, b))
}

/// `(d²/(n m²)) Ĉ − (1/n) x xᵀ` for one measured pair.
fn increment(x: &[f64], y: &[f64], z: &[f64], m: usize, n: usize) -> SymmetricMatrix {
    let d = x.len() as f64;
    let mut c = SymmetricMatrix::zeros(x.len());
    c.add_sym_outer(y, z);
    c.scale(d * d / (n as f64 * (m * m) as f64));
    c.add_outer(x, -1.0 / n as f64);
    c
}

/// Largest `‖X_t‖₂` seen over `draws` measurements of `x`, with `n = 1`.
pub fn mc_max_increment_norm(x: &[f64], m: usize, draws: usize, seed: u64, exec: Execution) -> Result<f64> {
    let parts = map_blocks(draws, BLOCK_SIZE, exec, |range| {
        let mut best: f64 = 0.0;
        for i in range {
            let (y, z) = projected_pair(x, i as u64, m, seed)?;
            best = best.max(spectral_norm(&increment(x, &y, &z, m, 1))?);
        }
        Ok::<_, crate::error::CslError>(best)
    });
    parts.into_iter().try_fold(0.0, |acc: f64, p| Ok(acc.max(p?)))
}

/// Monte Carlo `Σ_t E[X_t²]` for the columns of `x`, `draws_per_column`
/// measurement pairs each.
pub fn mc_variance_sum(x: &DataMatrix, m: usize, draws_per_column: usize, seed: u64, exec: Execution) -> Result<SymmetricMatrix> {
    let n = x.n_cols();
    let d = x.dim();
    let parts = map_blocks(n * draws_per_column, BLOCK_SIZE, exec, |range| {
        let mut s = SymmetricMatrix::zeros(d);
        for i in range {
            let col = x.column(i / draws_per_column);
            let (y, z) = projected_pair(col, i as u64, m, seed)?;
            s += &increment(col, &y, &z, m, n).squared();
        }
        Ok::<_, crate::error::CslError>(s)
    });
    let mut sum = SymmetricMatrix::zeros(d);
    for p in parts {
        sum += &p?;
    }
    sum.scale(1.0 / draws_per_column as f64);
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub estimate: f64,
    pub closed_form: f64,
    /// Quantity compared against `tolerance` (check-specific, see `rule`).
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub rule: &'static str,
}

#[derive(Debug, Clone)]
pub struct MomentsReport {
    pub d: usize,
    pub m: usize,
    pub draws: usize,
    pub checks: Vec<CheckResult>,
}

impl MomentsReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# moments check: d={} m={} draws={}", self.d, self.m, self.draws)?;
        writeln!(w, "check,estimate,closed_form,deviation,tolerance,rule,status")?;
        for c in &self.checks {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                c.name,
                fmt_sig(c.estimate, CSV_SIG_DIGITS),
                fmt_sig(c.closed_form, CSV_SIG_DIGITS),
                fmt_sig(c.deviation, CSV_SIG_DIGITS),
                fmt_sig(c.tolerance, CSV_SIG_DIGITS),
                c.rule,
                if c.passed { "pass" } else { "fail" }
            )?;
        }
        Ok(())
    }
}

fn frobenius(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn fourth_moment_check(name: &'static str, mc: &[f64], closed: &SymmetricMatrix) -> CheckResult {
    let diff: Vec<f64> = mc.iter().zip(closed.as_slice()).map(|(a, b)| a - b).collect();
    let rel = frobenius(&diff) / closed.frobenius_norm();
    CheckResult {
        name,
        estimate: frobenius(mc),
        closed_form: closed.frobenius_norm(),
        deviation: rel,
        tolerance: FOURTH_MOMENT_REL_TOL,
        passed: rel <= FOURTH_MOMENT_REL_TOL,
        rule: "relative Frobenius distance <= tolerance",
    }
}

/// Compares `moment_omega2`, `moment_yzyz`, `moment_yzzy`, `r_bound` and
/// `variance_bound` against Monte Carlo at the config's `(d, m)`.
pub fn run_moments_check(cfg: &ExperimentConfig) -> std::result::Result<MomentsReport, HarnessError> {
    cfg.validate_for(ExperimentKind::MomentsCheck)?;
    let (d, m, draws) = (cfg.d, cfg.m, cfg.draws);
    let exec = if cfg.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let seed = |salt: u64| mix64(cfg.master_seed ^ mix64(salt));
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    let mut checks = Vec::with_capacity(5);

    let (mean, se) = mc_omega2(d, m, draws, seed(1), exec)?;
    let closed = moment_omega2(d, m)?;
    checks.push(CheckResult {
        name: "moment_omega2",
        estimate: mean,
        closed_form: closed,
        deviation: (mean - closed).abs(),
        tolerance: OMEGA2_SE_BAND * se,
        passed: (mean - closed).abs() <= OMEGA2_SE_BAND * se,
        rule: "absolute difference <= 4 standard errors",
    });

    let (yzyz, yzzy) = mc_fourth_moments(&e1, m, draws, seed(2), exec)?;
    checks.push(fourth_moment_check("moment_yzyz", &yzyz, &moment_yzyz(&e1, m)?));
    checks.push(fourth_moment_check("moment_yzzy", &yzzy, &moment_yzzy(&e1, m)?));

    let p1 = ProblemParams::new(d, m, 1, 1, 1.0, 1.0, 0.5)?;
    let r = r_bound(&p1);
    let worst = mc_max_increment_norm(&e1, m, draws.min(R_BOUND_DRAWS), seed(3), exec)?;
    checks.push(CheckResult {
        name: "r_bound",
        estimate: worst,
        closed_form: r,
        deviation: worst,
        tolerance: r,
        passed: worst <= r,
        rule: "max sampled norm <= bound",
    });

    let n = cfg.columns;
    let cols: Vec<Vec<f64>> = (0..n as u64)
        .map(|t| sphere_vector(SeedSpec::for_column(seed(4), t, StreamRole::Data), d))
        .collect::<Result<_>>()?;
    let x = DataMatrix::from_columns(&cols)?;
    let per_column = (draws / n).max(2);
    let sigma2 = spectral_norm(&mc_variance_sum(&x, m, per_column, seed(5), exec)?)?;
    let pn = ProblemParams::new(d, m, 1, n, 1.0, 1.0, 0.5)?;
    let bound = variance_bound(&pn);
    checks.push(CheckResult {
        name: "variance_bound",
        estimate: sigma2,
        closed_form: bound,
        deviation: sigma2,
        tolerance: bound,
        passed: sigma2 <= bound,
        rule: "Monte Carlo variance <= bound",
    });

    Ok(MomentsReport { d, m, draws, checks })
}

/// Closed-form `‖Σ_t E[X_t²]‖₂` for the columns of `x`.
pub fn exact_variance(x: &DataMatrix, m: usize) -> Result<f64> {
    let mut sum = SymmetricMatrix::zeros(x.dim());
    for col in x.columns() {
        sum += &expected_increment_square(col, m, x.n_cols())?;
    }
    spectral_norm(&sum)
}
