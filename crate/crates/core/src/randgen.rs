//! Seeded randomness for measurements and synthetic data.
//!
//! Every draw is addressed by a [`SeedSpec`]: a master seed plus a stream id
//! derived from the column index and the role of the draw. Each pair owns an
//! isolated ChaCha8 stream, so results never depend on processing order or
//! thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{invalid, CslError, Result};
use crate::linalg::{dot, norm2, Projector};

/// Maximum number of redraws for a rank-deficient Gaussian frame.
pub const MAX_RETRIES: usize = 16;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamRole {
    Data = 0,
    Phi = 1,
    Psi = 2,
    Aux = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream `mix64(4t + role)` under `master_seed`.
    pub fn for_column(master_seed: u64, t: u64, role: StreamRole) -> Self {
        Self::new(
            master_seed,
            mix64(t.wrapping_mul(4).wrapping_add(role as u64)),
        )
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn sphere_vector_with<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Result<Vec<f64>> {
    if d == 0 {
        return Err(invalid("sphere dimension must be positive"));
    }
    loop {
        let mut g = gaussian_vector(rng, d);
        let r = norm2(&g);
        if r > 0.0 && r.is_finite() {
            g.iter_mut().for_each(|v| *v /= r);
            return Ok(g);
        }
    }
}

/// Uniform draw from the unit sphere in ℝᵈ (normalized Gaussian).
pub fn sphere_vector(seed: SeedSpec, d: usize) -> Result<Vec<f64>> {
    sphere_vector_with(&mut seed.rng(), d)
}

/// Modified Gram–Schmidt, applied twice. Returns false on rank deficiency.
fn orthonormalize(cols: &mut [f64], d: usize, m: usize) -> bool {
    for j in 0..m {
        let (done, rest) = cols.split_at_mut(j * d);
        let col = &mut rest[..d];
        let original = norm2(col);
        for _ in 0..2 {
            for i in 0..j {
                let q = &done[i * d..(i + 1) * d];
                let c = dot(q, col);
                col.iter_mut().zip(q).for_each(|(v, qi)| *v -= c * qi);
            }
        }
        let r = norm2(col);
        if !(r > 1e-10 * original) {
            return false;
        }
        col.iter_mut().for_each(|v| *v /= r);
    }
    true
}

/// Orthonormal `d × m` frame spanning `m` independent Gaussian directions,
/// column-major. Always samples, including when `m == d`.
pub fn random_frame_with<R: Rng + ?Sized>(rng: &mut R, d: usize, m: usize) -> Result<Vec<f64>> {
    if d == 0 || m == 0 || m > d {
        return Err(invalid(format!("frame shape {d}x{m} requires 1 <= m <= d")));
    }
    for _ in 0..=MAX_RETRIES {
        let mut cols = gaussian_vector(rng, d * m);
        if orthonormalize(&mut cols, d, m) {
            return Ok(cols);
        }
    }
    Err(CslError::RandFailure(format!(
        "rank-deficient draw persisted over {MAX_RETRIES} retries"
    )))
}

pub fn random_projection_with<R: Rng + ?Sized>(rng: &mut R, d: usize, m: usize) -> Result<Projector> {
    if m == d && d > 0 {
        return Ok(Projector::identity(d));
    }
    let basis = random_frame_with(rng, d, m)?;
    Ok(Projector::from_raw(d, m, basis))
}

/// Projector onto a uniformly random `m`-dimensional subspace of ℝᵈ.
/// Returns the identity when `m == d`.
pub fn random_projection(seed: SeedSpec, d: usize, m: usize) -> Result<Projector> {
    random_projection_with(&mut seed.rng(), d, m)
}

/// Parameters of `Beta(m/2, (d−m)/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(invalid(format!("Beta parameters must be positive, got ({alpha}, {beta})")));
        }
        Ok(Self { alpha, beta })
    }

    /// Law of `‖Φx‖²/‖x‖²` for a random rank-`m` projection in ℝᵈ.
    pub fn for_projection(d: usize, m: usize) -> Result<Self> {
        if m == 0 || m >= d {
            return Err(invalid(format!("Beta law needs 1 <= m < d, got m={m}, d={d}")));
        }
        Self::new(m as f64 / 2.0, (d - m) as f64 / 2.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}

pub fn beta_sample_with<R: Rng + ?Sized>(rng: &mut R, p: BetaParams) -> f64 {
    // a ~ χ²(2α), b ~ χ²(2β); both constructors succeed for positive dof
    let chi_a = ChiSquared::new(2.0 * p.alpha).expect("positive dof");
    let chi_b = ChiSquared::new(2.0 * p.beta).expect("positive dof");
    loop {
        let a: f64 = chi_a.sample(rng);
        let b: f64 = chi_b.sample(rng);
        let s = a + b;
        if s > 0.0 {
            return (a / s).clamp(0.0, 1.0);
        }
    }
}

/// `Beta(α, β)` variate as the chi-square ratio `a / (a + b)`.
pub fn beta_sample(seed: SeedSpec, p: BetaParams) -> f64 {
    beta_sample_with(&mut seed.rng(), p)
}

/// Applies the Householder reflection whose first column is `±x̂` to `(0, α)`,
/// giving `W α` for an orthonormal basis `W` of `x̂`'s complement.
fn complement_embed(unit_x: &[f64], alpha: &[f64]) -> Vec<f64> {
    let s = if unit_x[0] >= 0.0 { 1.0 } else { -1.0 };
    let mut v = unit_x.to_vec();
    v[0] += s;
    let vv = dot(&v, &v); // = 2(1 + |x̂₁|) >= 2
    let mut u = Vec::with_capacity(unit_x.len());
    u.push(0.0);
    u.extend_from_slice(alpha);
    let c = 2.0 * dot(&v, &u) / vv;
    u.iter_mut().zip(&v).for_each(|(ui, vi)| *ui -= c * vi);
    u
}

pub fn geometric_measurement_with<R: Rng + ?Sized>(rng: &mut R, x: &[f64], m: usize) -> Result<Vec<f64>> {
    let d = x.len();
    let p = BetaParams::for_projection(d, m)?;
    let r = norm2(x);
    if r == 0.0 {
        return Err(invalid("geometric measurement of the zero vector"));
    }
    let omega = beta_sample_with(rng, p);
    let alpha = sphere_vector_with(rng, d - 1)?;
    let unit: Vec<f64> = x.iter().map(|v| v / r).collect();
    let w_alpha = complement_embed(&unit, &alpha);
    let side = r * (omega * (1.0 - omega)).sqrt();
    Ok(x
        .iter()
        .zip(&w_alpha)
        .map(|(xi, wi)| omega * xi + side * wi)
        .collect())
}

/// Sample with the law of `Φx` for a uniformly random rank-`m` projection `Φ`,
/// built from its Beta/sphere decomposition rather than from a projector.
pub fn geometric_measurement(seed: SeedSpec, x: &[f64], m: usize) -> Result<Vec<f64>> {
    geometric_measurement_with(&mut seed.rng(), x, m)
}
