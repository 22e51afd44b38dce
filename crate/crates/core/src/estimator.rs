//! Compressive subspace learning, the shared-projection baseline and exact PCA.

use crate::error::{invalid, CslError, Result};
use crate::linalg::{eig_sym, norm2, top_k_projector, DataMatrix, Projector, SymmetricMatrix};
use crate::par::{map_blocks, Execution, BLOCK_SIZE};
use crate::randgen::{random_projection, SeedSpec, StreamRole};

/// Columns with `‖x_t‖₂` at or below this are absorbed as exact zeros.
pub const ZERO_COLUMN_TOL: f64 = 1e-14;

/// How the two measurement vectors of a column are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementMode {
    /// `y = Φx`, `z = Ψx` with independent projections.
    #[default]
    Paired,
    /// `z ≡ y = Φx`; only `m` scalar measurements per column.
    Single,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CslOptions {
    pub execution: Execution,
    pub mode: MeasurementMode,
}

/// `Ĉ = ½(y zᵀ + z yᵀ)`.
pub fn chat(y: &[f64], z: &[f64]) -> Result<SymmetricMatrix> {
    if y.len() != z.len() || y.is_empty() {
        return Err(invalid(format!(
            "measurement lengths differ or are empty: {} vs {}",
            y.len(),
            z.len()
        )));
    }
    let mut c = SymmetricMatrix::zeros(y.len());
    c.add_sym_outer(y, z);
    Ok(c)
}

/// Running `Σ_t Ĉ_t` over absorbed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceAccumulator {
    dim: usize,
    m: usize,
    sum: SymmetricMatrix,
    count: usize,
}

impl CovarianceAccumulator {
    pub fn new(dim: usize, m: usize) -> Result<Self> {
        if dim == 0 || m == 0 || m > dim {
            return Err(invalid(format!("accumulator needs 1 <= m <= d, got m={m}, d={dim}")));
        }
        Ok(Self {
            dim,
            m,
            sum: SymmetricMatrix::zeros(dim),
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sum(&self) -> &SymmetricMatrix {
        &self.sum
    }

    pub fn absorb(&mut self, y: &[f64], z: &[f64]) -> Result<()> {
        if y.len() != self.dim || z.len() != self.dim {
            return Err(invalid(format!(
                "expected measurements of length {}, got {} and {}",
                self.dim,
                y.len(),
                z.len()
            )));
        }
        self.sum.add_sym_outer(y, z);
        self.count += 1;
        Ok(())
    }

    /// Counts a column whose estimate is exactly zero.
    pub fn absorb_zero(&mut self) {
        self.count += 1;
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if other.dim != self.dim || other.m != self.m {
            return Err(invalid("cannot merge accumulators of different shape"));
        }
        self.sum += &other.sum;
        self.count += other.count;
        Ok(())
    }

    /// `d² / (n m²)`, the factor turning the sum into an unbiased estimate of Σ.
    pub fn rescale_factor(&self) -> f64 {
        let (d, m) = (self.dim as f64, self.m as f64);
        d * d / (self.count as f64 * m * m)
    }

    /// Eigendecomposes the rescaled sum and keeps the top-`k` subspace.
    ///
    /// Rescaling leaves the subspace unchanged; it only makes the reported
    /// eigenvalues estimates of those of Σ.
    pub fn finalize(&self, k: usize) -> Result<SubspaceEstimate> {
        if self.count == 0 {
            return Err(invalid("cannot finalize an empty accumulator"));
        }
        check_rank(k, self.dim)?;
        if self.sum.max_abs_entry() == 0.0 {
            return Err(CslError::DegenerateInput(
                "accumulated covariance is identically zero".into(),
            ));
        }
        let rescaled = self.sum.scaled(self.rescale_factor());
        SubspaceEstimate::from_matrix(&rescaled, k, self.count, self.m)
    }
}

fn check_rank(k: usize, d: usize) -> Result<()> {
    if k == 0 || k >= d {
        return Err(invalid(format!("target rank k={k} must satisfy 1 <= k < d={d}")));
    }
    Ok(())
}

/// Rank-`k` principal subspace estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceEstimate {
    pub projector: Projector,
    /// Top `k + 1` eigenvalues of the matrix the subspace was cut from.
    pub eigenvalues: Vec<f64>,
    pub n: usize,
    pub m: usize,
    pub k: usize,
}

impl SubspaceEstimate {
    fn from_matrix(a: &SymmetricMatrix, k: usize, n: usize, m: usize) -> Result<Self> {
        let e = eig_sym(a)?;
        Ok(Self {
            projector: top_k_projector(&e, k)?,
            eigenvalues: e.values()[..k + 1].to_vec(),
            n,
            m,
            k,
        })
    }

    /// `λ_k − λ_{k+1}` of the source matrix.
    pub fn eigengap(&self) -> f64 {
        self.eigenvalues[self.k - 1] - self.eigenvalues[self.k]
    }
}

/// The pair `(y_t, z_t)` for column `x` measured on stream index `t`, or
/// `None` when the column is numerically zero.
pub fn measure_column(
    x: &[f64],
    t: u64,
    m: usize,
    seed: u64,
    mode: MeasurementMode,
) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    if norm2(x) <= ZERO_COLUMN_TOL {
        return Ok(None);
    }
    let d = x.len();
    let phi = random_projection(SeedSpec::for_column(seed, t, StreamRole::Phi), d, m)?;
    let y = phi.apply(x);
    let z = match mode {
        MeasurementMode::Paired => {
            random_projection(SeedSpec::for_column(seed, t, StreamRole::Psi), d, m)?.apply(x)
        }
        MeasurementMode::Single => y.clone(),
    };
    Ok(Some((y, z)))
}

/// Measures and absorbs every column, column `t` using stream index
/// `stream_index[t]`. Blocks are merged in ascending order.
pub fn accumulate_csl_indexed(
    x: &DataMatrix,
    stream_index: &[u64],
    m: usize,
    seed: u64,
    opts: CslOptions,
) -> Result<CovarianceAccumulator> {
    let d = x.dim();
    if stream_index.len() != x.n_cols() {
        return Err(invalid("one stream index per column required"));
    }
    let mut total = CovarianceAccumulator::new(d, m)?;
    let partials = map_blocks(x.n_cols(), BLOCK_SIZE, opts.execution, |range| {
        let mut acc = CovarianceAccumulator::new(d, m)?;
        for t in range {
            match measure_column(x.column(t), stream_index[t], m, seed, opts.mode)? {
                Some((y, z)) => acc.absorb(&y, &z)?,
                None => acc.absorb_zero(),
            }
        }
        Ok::<_, CslError>(acc)
    });
    for part in partials {
        total.merge(&part?)?;
    }
    Ok(total)
}

/// Stream indices `0..n`, the layout used by [`run_csl`].
pub fn accumulate_csl(x: &DataMatrix, m: usize, seed: u64, opts: CslOptions) -> Result<CovarianceAccumulator> {
    let idx: Vec<u64> = (0..x.n_cols() as u64).collect();
    accumulate_csl_indexed(x, &idx, m, seed, opts)
}

/// Compressive subspace learning: a fresh pair of random rank-`m`
/// projections per column, symmetrized outer products summed, top-`k`
/// eigenvectors returned.
pub fn run_csl(x: &DataMatrix, m: usize, k: usize, seed: u64, opts: CslOptions) -> Result<SubspaceEstimate> {
    check_rank(k, x.dim())?;
    accumulate_csl(x, m, seed, opts)?.finalize(k)
}

/// Shared-projection baseline: one projector for all columns, PCA of `ΦX`.
pub fn run_hmt_baseline(
    x: &DataMatrix,
    m: usize,
    k: usize,
    seed: u64,
    execution: Execution,
) -> Result<SubspaceEstimate> {
    let d = x.dim();
    check_rank(k, d)?;
    let phi = random_projection(SeedSpec::for_column(seed, 0, StreamRole::Phi), d, m)?;
    let partials = map_blocks(x.n_cols(), BLOCK_SIZE, execution, |range| {
        let mut s = SymmetricMatrix::zeros(d);
        for t in range {
            s.add_outer(&phi.apply(x.column(t)), 1.0);
        }
        s
    });
    let mut sum = SymmetricMatrix::zeros(d);
    for p in &partials {
        sum += p;
    }
    sum.scale(1.0 / x.n_cols() as f64);
    SubspaceEstimate::from_matrix(&sum, k, x.n_cols(), m)
}

/// Top-`k` eigenvectors of `(1/n) X Xᵀ`.
pub fn exact_pca(x: &DataMatrix, k: usize) -> Result<SubspaceEstimate> {
    check_rank(k, x.dim())?;
    SubspaceEstimate::from_matrix(&x.covariance(), k, x.n_cols(), x.dim())
}
