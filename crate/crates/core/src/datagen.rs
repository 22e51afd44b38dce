//! Synthetic data with controlled rank, eigengap and column-norm bound.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{eig_sym, top_k_projector, DataMatrix, Projector};
use crate::par::{map_blocks, Execution, BLOCK_SIZE};
use crate::randgen::{gaussian_vector, random_frame_with, sphere_vector, SeedSpec, StreamRole};

/// Relative eigengap below which [`empirical_truth`] flags the subspace as unidentifiable.
pub const DEGENERATE_GAP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    /// Columns confined to a k-dimensional subspace.
    ExactLowRank,
    /// k spiked directions over an isotropic bulk.
    Spiked,
    /// Every column equal to one fixed vector.
    Rank1Identical,
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DataKind::ExactLowRank => "exact_low_rank",
            DataKind::Spiked => "spiked",
            DataKind::Rank1Identical => "rank1_identical",
        })
    }
}

impl FromStr for DataKind {
    type Err = crate::error::CslError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_low_rank" => Ok(DataKind::ExactLowRank),
            "spiked" => Ok(DataKind::Spiked),
            "rank1_identical" => Ok(DataKind::Rank1Identical),
            other => Err(invalid(format!("unknown data kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub d: usize,
    pub n: usize,
    pub k: usize,
    pub kind: DataKind,
    /// Target eigenvalues of Σ, length `d`, non-increasing. Unused for
    /// [`DataKind::Rank1Identical`].
    pub spectrum: Vec<f64>,
    /// Cap on squared column norms. Data are shrunk by one global factor
    /// when the cap binds; for rank-one data it is the exact squared norm.
    pub mu_cap: f64,
    pub seed: u64,
}

impl DataSpec {
    /// Spikes `bulk + γ·(k−i)` for `i < k`, then `bulk` for the remaining
    /// `d − k` entries, so the gap at `k` is exactly `γ`.
    pub fn ladder_spectrum(d: usize, k: usize, gamma: f64, bulk: f64) -> Vec<f64> {
        (0..d)
            .map(|i| if i < k { bulk + gamma * (k - i) as f64 } else { bulk })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let Self { d, n, k, .. } = *self;
        if d < 2 || n == 0 || k == 0 || k >= d {
            return Err(invalid(format!("need d >= 2, n >= 1, 1 <= k < d (d={d}, n={n}, k={k})")));
        }
        if !(self.mu_cap > 0.0 && self.mu_cap.is_finite()) {
            return Err(invalid("mu_cap must be positive and finite"));
        }
        if self.kind == DataKind::Rank1Identical {
            if k != 1 {
                return Err(invalid("rank1_identical data has k = 1"));
            }
            return Ok(());
        }
        let s = &self.spectrum;
        if s.len() != d {
            return Err(invalid(format!("spectrum has {} entries, expected {d}", s.len())));
        }
        if s.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid("spectrum entries must be finite and nonnegative"));
        }
        if s.windows(2).any(|w| w[1] > w[0]) {
            return Err(invalid("spectrum must be non-increasing"));
        }
        if !(s[k - 1] > s[k]) {
            return Err(invalid(format!("spectrum has no gap at k={k}")));
        }
        let tail = &s[k..];
        match self.kind {
            DataKind::ExactLowRank if tail.iter().any(|&v| v != 0.0) => {
                Err(invalid("exact_low_rank spectrum must vanish beyond k"))
            }
            DataKind::Spiked if tail.iter().any(|&v| v != tail[0]) => {
                Err(invalid("spiked spectrum must be flat beyond k"))
            }
            _ => Ok(()),
        }
    }
}

/// Subspace, eigengap and norm bound an experiment is scored against.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub projector: Projector,
    pub gamma_k: f64,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct GeneratedData {
    pub x: DataMatrix,
    /// Population subspace of the generating model, with the realized
    /// empirical eigengap and `max_t ‖x_t‖²` of `x`.
    pub truth: GroundTruth,
}

pub fn generate(spec: &DataSpec) -> Result<GeneratedData> {
    generate_with(spec, Execution::Parallel)
}

pub fn generate_with(spec: &DataSpec, exec: Execution) -> Result<GeneratedData> {
    spec.validate()?;
    let (d, n, k) = (spec.d, spec.n, spec.k);
    let frame_seed = SeedSpec::for_column(spec.seed, 0, StreamRole::Aux);

    let (population, data) = match spec.kind {
        DataKind::Rank1Identical => {
            let u = sphere_vector(frame_seed, d)?;
            let x: Vec<f64> = u.iter().map(|v| v * spec.mu_cap.sqrt()).collect();
            let data: Vec<f64> = x.iter().copied().cycle().take(d * n).collect();
            (Projector::from_raw(d, 1, u), data)
        }
        DataKind::ExactLowRank | DataKind::Spiked => {
            let frame = random_frame_with(&mut frame_seed.rng(), d, k)?;
            let bulk = if spec.kind == DataKind::Spiked { spec.spectrum[k] } else { 0.0 };
            let scales: Vec<f64> = spec.spectrum[..k].iter().map(|l| (l - bulk).sqrt()).collect();
            let sqrt_bulk = bulk.sqrt();
            let blocks = map_blocks(n, BLOCK_SIZE, exec, |range| {
                let mut out = Vec::with_capacity(range.len() * d);
                for t in range {
                    let mut rng = SeedSpec::for_column(spec.seed, t as u64, StreamRole::Data).rng();
                    let g = gaussian_vector(&mut rng, k);
                    let mut col = vec![0.0; d];
                    for (i, (gi, si)) in g.iter().zip(&scales).enumerate() {
                        let c = gi * si;
                        let v = &frame[i * d..(i + 1) * d];
                        col.iter_mut().zip(v).for_each(|(x, vi)| *x += c * vi);
                    }
                    if sqrt_bulk > 0.0 {
                        let h = gaussian_vector(&mut rng, d);
                        col.iter_mut().zip(&h).for_each(|(x, hi)| *x += sqrt_bulk * hi);
                    }
                    out.extend(col);
                }
                out
            });
            let mut data = blocks.concat();
            let max_sq = data.chunks_exact(d).map(|c| c.iter().map(|v| v * v).sum::<f64>()).fold(0.0, f64::max);
            if max_sq > spec.mu_cap {
                let s = (spec.mu_cap / max_sq).sqrt();
                data.iter_mut().for_each(|v| *v *= s);
            }
            (Projector::from_raw(d, k, frame), data)
        }
    };

    let x = DataMatrix::new(d, n, data)?;
    let emp = empirical_truth(&x, k)?;
    Ok(GeneratedData {
        truth: GroundTruth {
            projector: population,
            gamma_k: emp.gamma_k,
            mu: emp.mu,
        },
        x,
    })
}

/// Exact PCA of a realized data matrix.
#[derive(Debug, Clone)]
pub struct EmpiricalTruth {
    pub projector: Projector,
    /// Eigenvalues of `(1/n) X Xᵀ`, non-increasing.
    pub eigenvalues: Vec<f64>,
    pub gamma_k: f64,
    pub mu: f64,
    /// Set when `γ_k` is negligible relative to `λ₁`.
    pub degenerate_gap: bool,
}

impl EmpiricalTruth {
    pub fn as_ground_truth(&self) -> GroundTruth {
        GroundTruth {
            projector: self.projector.clone(),
            gamma_k: self.gamma_k,
            mu: self.mu,
        }
    }
}

pub fn empirical_truth(x: &DataMatrix, k: usize) -> Result<EmpiricalTruth> {
    let d = x.dim();
    if k == 0 || k >= d {
        return Err(invalid(format!("need 1 <= k < d, got k={k}, d={d}")));
    }
    let e = eig_sym(&x.covariance())?;
    let gamma_k = e.eigengap(k).expect("k < d");
    let lead = e.values()[0].abs();
    Ok(EmpiricalTruth {
        projector: top_k_projector(&e, k)?,
        eigenvalues: e.values().to_vec(),
        gamma_k,
        mu: x.max_sq_norm(),
        degenerate_gap: gamma_k <= DEGENERATE_GAP_TOL * lead,
    })
}

/// Writes `x` as text: a `# d n kind seed` header, then one column per line.
pub fn write_matrix<W: Write>(mut w: W, x: &DataMatrix, kind: DataKind, seed: u64) -> io::Result<()> {
    writeln!(w, "# {} {} {} {}", x.dim(), x.n_cols(), kind, seed)?;
    for col in x.columns() {
        let line: Vec<String> = col.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Header fields of an exported matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixHeader {
    pub d: usize,
    pub n: usize,
    pub kind: DataKind,
    pub seed: u64,
}

/// Parses the format produced by [`write_matrix`].
pub fn read_matrix<R: BufRead>(r: R) -> Result<(MatrixHeader, DataMatrix)> {
    let mut lines = r.lines();
    let io_err = |e: io::Error| invalid(format!("read error: {e}"));
    let header = lines.next().ok_or_else(|| invalid("empty matrix file"))?.map_err(io_err)?;
    let fields: Vec<&str> = header
        .strip_prefix('#')
        .ok_or_else(|| invalid("missing '#' header"))?
        .split_whitespace()
        .collect();
    let [d, n, kind, seed] = fields[..] else {
        return Err(invalid("header must be '# d n kind seed'"));
    };
    let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| invalid(format!("bad integer {s:?}")));
    let header = MatrixHeader {
        d: parse_usize(d)?,
        n: parse_usize(n)?,
        kind: kind.parse()?,
        seed: seed.parse().map_err(|_| invalid(format!("bad seed {seed:?}")))?,
    };
    let mut data = Vec::with_capacity(header.d * header.n);
    for line in lines {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            data.push(tok.parse::<f64>().map_err(|_| invalid(format!("bad number {tok:?}")))?);
        }
        if data.len() - before != header.d {
            return Err(invalid("column line has wrong length"));
        }
    }
    let x = DataMatrix::new(header.d, header.n, data)?;
    Ok((header, x))
}
