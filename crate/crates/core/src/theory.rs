//! Closed-form error bounds, measurement moments and the cost model.
//!
//! All logarithms are natural.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Result};
use crate::linalg::{dot, SymmetricMatrix};

/// Problem size and regularity parameters entering the error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParams {
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub n: usize,
    /// Bound on squared column norms.
    pub mu: f64,
    /// Eigengap `λ_k − λ_{k+1}` of the covariance.
    pub gamma_k: f64,
    /// Failure probability.
    pub delta: f64,
}

impl ProblemParams {
    pub fn new(d: usize, m: usize, k: usize, n: usize, mu: f64, gamma_k: f64, delta: f64) -> Result<Self> {
        let p = Self {
            d,
            m,
            k,
            n,
            mu,
            gamma_k,
            delta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.d {
            return Err(invalid(format!("need 1 <= m <= d, got m={}, d={}", self.m, self.d)));
        }
        if self.k == 0 || self.k >= self.d {
            return Err(invalid(format!("need 1 <= k < d, got k={}, d={}", self.k, self.d)));
        }
        if self.n == 0 {
            return Err(invalid("n must be positive"));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return Err(invalid("mu must be positive"));
        }
        if !(self.gamma_k > 0.0 && self.gamma_k.is_finite()) {
            return Err(invalid("gamma_k must be positive"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(invalid("delta must lie in (0, 1)"));
        }
        Ok(())
    }

    fn log_term(&self) -> f64 {
        (self.d as f64 / self.delta).ln()
    }
}

/// High-probability bound on `‖Π̂ − Π‖₂`:
/// `(1/γ)(√(44μ²L/(nm)) + (2/3)·μd²L/(m²n))` with `L = log(d/δ)`.
pub fn error_bound(p: &ProblemParams) -> f64 {
    let (d, m, n) = (p.d as f64, p.m as f64, p.n as f64);
    let l = p.log_term();
    let variance_term = (44.0 * p.mu * p.mu / (n * m) * l).sqrt();
    let range_term = 2.0 / 3.0 * p.mu * d * d / (m * m * n) * l;
    (variance_term + range_term) / p.gamma_k
}

/// The two lower bounds on `n` whose maximum guarantees error `eps`.
pub fn sample_complexity_branches(p: &ProblemParams, eps: f64) -> (f64, f64) {
    let (d, m) = (p.d as f64, p.m as f64);
    let l = p.log_term();
    let g = p.gamma_k;
    let first = 176.0 * p.mu * p.mu * l / (m * g * g * eps * eps);
    let second = 4.0 / 3.0 * p.mu * d * d * l / (g * eps * m * m);
    (first, second)
}

/// Smallest integer `n` meeting both sample-complexity branches. The `n`
/// field of `p` is ignored.
pub fn sample_complexity(p: &ProblemParams, eps: f64) -> Result<u64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("eps must be positive"));
    }
    let (a, b) = sample_complexity_branches(p, eps);
    Ok(a.max(b).ceil().max(1.0) as u64)
}

/// Measurements per column that suffice, up to constants:
/// `(d/√n)·√(μ log(d/δ)/(ε γ))`.
pub fn m_sufficient(p: &ProblemParams, eps: f64) -> f64 {
    let (d, n) = (p.d as f64, p.n as f64);
    d / n.sqrt() * (p.mu * p.log_term() / (eps * p.gamma_k)).sqrt()
}

/// Almost-sure bound `2d²μ/(nm²)` on `‖X_t‖₂`.
pub fn r_bound(p: &ProblemParams) -> f64 {
    let (d, m, n) = (p.d as f64, p.m as f64, p.n as f64);
    2.0 * d * d * p.mu / (n * m * m)
}

/// Stated variance bound `22μ²/(mn)`.
pub fn variance_bound(p: &ProblemParams) -> f64 {
    22.0 * p.mu * p.mu / (p.m as f64 * p.n as f64)
}

fn check_moment_args(d: usize, m: usize) -> Result<()> {
    if m == 0 || m >= d {
        return Err(invalid(format!("moment formulas need 1 <= m < d, got m={m}, d={d}")));
    }
    Ok(())
}

/// `E ω² = m(m+2)/(d(d+2))` for `ω ~ Beta(m/2, (d−m)/2)`; equals 1 when `m = d`.
pub fn moment_omega2(d: usize, m: usize) -> Result<f64> {
    if m == 0 || m > d {
        return Err(invalid(format!("need 1 <= m <= d, got m={m}, d={d}")));
    }
    let (d, m) = (d as f64, m as f64);
    Ok(m * (m + 2.0) / (d * (d + 2.0)))
}

/// `a · x xᵀ + b · (I − x xᵀ/‖x‖²)`.
fn along_and_across(x: &[f64], along: f64, across: f64) -> SymmetricMatrix {
    let sq = dot(x, x);
    let mut out = SymmetricMatrix::identity(x.len());
    out.scale(across);
    out.add_outer(x, along - across / sq);
    out
}

fn nonzero(x: &[f64]) -> Result<f64> {
    let sq = dot(x, x);
    if x.is_empty() || sq == 0.0 {
        return Err(invalid("moment formulas need a nonzero x"));
    }
    Ok(sq)
}

/// `E[y zᵀ y zᵀ]` for independent rank-`m` projections of `x ∈ ℝᵈ`:
/// `‖x‖²(E ω²)² x xᵀ + ‖x‖⁴ (m(d−m)/(d(d+2)(d−1)))² W Wᵀ`.
pub fn moment_yzyz(x: &[f64], m: usize) -> Result<SymmetricMatrix> {
    let d = x.len();
    check_moment_args(d, m)?;
    let sq = nonzero(x)?;
    let (df, mf) = (d as f64, m as f64);
    let w2 = mf * (mf + 2.0) / (df * (df + 2.0));
    let cross = mf * (df - mf) / (df * (df + 2.0) * (df - 1.0));
    Ok(along_and_across(x, sq * w2 * w2, sq * sq * cross * cross))
}

/// `E[y zᵀ z yᵀ] = E‖z‖² · E[y yᵀ]`, expanded in four terms:
///
/// ```text
/// E η² E ω²        ‖x‖²  x xᵀ
/// E η² E(ω−ω²)     ‖x‖⁴  W Wᵀ / (d−1)
/// E(η−η²) E ω²     ‖x‖²  x xᵀ
/// E(η−η²) E(ω−ω²)  ‖x‖⁴  W Wᵀ / (d−1)
/// ```
///
/// with `E ω = m/d`, `E ω² = m(m+2)/(d(d+2))`, `E(ω−ω²) = m(d−m)/(d(d+2))`.
/// The sphere factor `E[α αᵀ] = I/(d−1)` enters once per term, since
/// `‖β‖ = 1` contributes no such factor.
pub fn moment_yzzy(x: &[f64], m: usize) -> Result<SymmetricMatrix> {
    let d = x.len();
    check_moment_args(d, m)?;
    let sq = nonzero(x)?;
    let (df, mf) = (d as f64, m as f64);
    let e2 = mf * (mf + 2.0) / (df * (df + 2.0));
    let ev = mf * (df - mf) / (df * (df + 2.0));
    let along = sq * (e2 * e2 + ev * e2);
    let across = sq * sq * (e2 * ev + ev * ev) / (df - 1.0);
    Ok(along_and_across(x, along, across))
}

/// `E[X_t²]` for the centered increment
/// `X_t = (d²/(nm²))·Ĉ_t − (1/n)·x xᵀ`, using
/// `E Ĉ² = ½ E[y zᵀ y zᵀ] + ½ E[y zᵀ z yᵀ]`.
pub fn expected_increment_square(x: &[f64], m: usize, n: usize) -> Result<SymmetricMatrix> {
    let d = x.len() as f64;
    let a = d * d / (n as f64 * (m * m) as f64);
    let mut out = moment_yzyz(x, m)?;
    out += &moment_yzzy(x, m)?;
    out.scale(0.5 * a * a);
    let sq = dot(x, x);
    out.add_outer(x, -sq / (n * n) as f64);
    Ok(out)
}

/// The three-term rational bracket bounding the per-column variance; the
/// variance is at most `d⁴μ²/(m⁴n)` times this value.
pub fn variance_bracket(d: usize, m: usize) -> Result<f64> {
    check_moment_args(d, m)?;
    let (d, m) = (d as f64, m as f64);
    let cross = (m * (d - m) / (d * (d + 2.0) * (d - 1.0))).powi(2);
    let mixed = m * m * (m + 2.0) * (d - m) / (d * d * (d + 2.0).powi(2) * (d - 1.0));
    let along = m * m * (m + 2.0).powi(2) / (d * d * (d + 2.0).powi(2)) - m.powi(4) / d.powi(4);
    Ok(cross + mixed + along)
}

/// `d⁴μ²/(m⁴n) · bracket`, the variance value the stated bound is derived from.
pub fn variance_bracket_bound(p: &ProblemParams) -> Result<f64> {
    let (d, m, n) = (p.d as f64, p.m as f64, p.n as f64);
    Ok(d.powi(4) * p.mu * p.mu / (m.powi(4) * n) * variance_bracket(p.d, p.m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Full observation and transmission of every column.
    Naive,
    /// One projection shared by every sensor, synchronized up front.
    Shared,
    /// Independent per-column projections.
    Csl,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Naive, Scheme::Shared, Scheme::Csl];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Naive => "naive",
            Scheme::Shared => "shared",
            Scheme::Csl => "csl",
        })
    }
}

impl FromStr for Scheme {
    type Err = crate::error::CslError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Scheme::Naive),
            "shared" => Ok(Scheme::Shared),
            "csl" => Ok(Scheme::Csl),
            other => Err(invalid(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cost {
    /// Scalar measurements acquired across the network.
    pub measurements: u64,
    /// Scalars communicated, including projection synchronization.
    pub communication: u64,
}

/// Measurement and communication counts for `n` sensors observing ℝᵈ.
///
/// naive: `(nd, nd)`; shared: `(2mn, nmd + 2nd)`; csl: `(2mn, 2nd)`.
pub fn cost_model(scheme: Scheme, n: u64, d: u64, m: u64) -> Result<Cost> {
    if n == 0 || d == 0 || m == 0 || m > d {
        return Err(invalid(format!("cost model needs n, d >= 1 and 1 <= m <= d (n={n}, d={d}, m={m})")));
    }
    let overflow = || invalid("cost overflows u64");
    let mul = |a: u64, b: u64| a.checked_mul(b).ok_or_else(overflow);
    let two_mn = mul(mul(2, m)?, n)?;
    let two_nd = mul(mul(2, n)?, d)?;
    Ok(match scheme {
        Scheme::Naive => Cost {
            measurements: mul(n, d)?,
            communication: mul(n, d)?,
        },
        Scheme::Shared => Cost {
            measurements: two_mn,
            communication: mul(mul(n, m)?, d)?.checked_add(two_nd).ok_or_else(overflow)?,
        },
        Scheme::Csl => Cost {
            measurements: two_mn,
            communication: two_nd,
        },
    })
}
