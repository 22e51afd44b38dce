//! Experiment rows, canonical ordering and CSV output.

use std::cmp::Ordering;
use std::fmt;
use std::io::{self, Write};

pub const CSV_HEADER: &str =
    "experiment,algorithm,trial,seed,n,d,m,k,gamma_k,mu,error,rescaled_error,wall_time_ms";

/// Significant digits for floating-point CSV fields.
pub const CSV_SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Csl,
    Hmt,
    Exact,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Csl => "csl",
            Algorithm::Hmt => "hmt",
            Algorithm::Exact => "exact",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    /// Realized eigengap of the trial's data.
    pub gamma_k: f64,
    pub mu: f64,
    pub error: f64,
    pub rescaled_error: f64,
    pub wall_time_ms: f64,
    /// Configured eigengap of the grid point; orders rows, not written.
    pub gamma_param: f64,
}

impl ExperimentRecord {
    /// Sets `error` and `rescaled_error = √n · error`.
    pub fn with_error(mut self, error: f64) -> Self {
        self.error = error;
        self.rescaled_error = (self.n as f64).sqrt() * error;
        self
    }

    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.experiment
            .cmp(&other.experiment)
            .then(self.algorithm.cmp(&other.algorithm))
            .then(self.n.cmp(&other.n))
            .then(self.m.cmp(&other.m))
            .then(self.d.cmp(&other.d))
            .then(self.k.cmp(&other.k))
            .then(self.gamma_param.total_cmp(&other.gamma_param))
            .then(self.trial.cmp(&other.trial))
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.algorithm,
            self.trial,
            self.seed,
            self.n,
            self.d,
            self.m,
            self.k,
            fmt_sig(self.gamma_k, CSV_SIG_DIGITS),
            fmt_sig(self.mu, CSV_SIG_DIGITS),
            fmt_sig(self.error, CSV_SIG_DIGITS),
            fmt_sig(self.rescaled_error, CSV_SIG_DIGITS),
            fmt_sig(self.wall_time_ms, CSV_SIG_DIGITS),
        )
    }
}

pub fn sort_canonical(records: &mut [ExperimentRecord]) {
    records.sort_by(ExperimentRecord::canonical_cmp);
}

/// Writes the header and rows, LF-terminated, in the given order.
pub fn write_csv<W: Write>(mut w: W, records: &[ExperimentRecord]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

/// `printf("%.{sig}g")`: `sig` significant digits, trailing zeros dropped,
/// exponent form outside `1e-4 <= |x| < 10^sig`.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty(), "median of empty set");
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-grid-point medians over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub experiment: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub gamma: f64,
    pub trials: usize,
    pub median_error: f64,
    pub median_rescaled_error: f64,
}

pub const SUMMARY_HEADER: &str =
    "experiment,algorithm,n,d,m,k,gamma,trials,median_error,median_rescaled_error";

/// Groups canonically sorted records by grid point.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    let mut sorted = records.to_vec();
    sort_canonical(&mut sorted);
    let same_point = |a: &ExperimentRecord, b: &ExperimentRecord| {
        a.experiment == b.experiment
            && a.algorithm == b.algorithm
            && a.n == b.n
            && a.m == b.m
            && a.d == b.d
            && a.k == b.k
            && a.gamma_param.total_cmp(&b.gamma_param).is_eq()
    };
    sorted
        .chunk_by(same_point)
        .map(|group| {
            let first = &group[0];
            let mut errs: Vec<f64> = group.iter().map(|r| r.error).collect();
            let mut resc: Vec<f64> = group.iter().map(|r| r.rescaled_error).collect();
            SummaryRow {
                experiment: first.experiment.clone(),
                algorithm: first.algorithm,
                n: first.n,
                d: first.d,
                m: first.m,
                k: first.k,
                gamma: first.gamma_param,
                trials: group.len(),
                median_error: median(&mut errs),
                median_rescaled_error: median(&mut resc),
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.algorithm,
            r.n,
            r.d,
            r.m,
            r.k,
            fmt_sig(r.gamma, CSV_SIG_DIGITS),
            r.trials,
            fmt_sig(r.median_error, CSV_SIG_DIGITS),
            fmt_sig(r.median_rescaled_error, CSV_SIG_DIGITS),
        )?;
    }
    Ok(())
}
