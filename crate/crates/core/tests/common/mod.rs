//! Reference computations shared by the integration tests. Nothing here
//! calls into the eigensolver under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Row-major symmetric matrix with N(0,1) entries on and above the diagonal.
pub fn random_symmetric(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let mut a = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let v: f64 = rng.sample(StandardNormal);
            a[i * d + j] = v;
            a[j * d + i] = v;
        }
    }
    a
}

/// Determinant by cofactor expansion along the first row.
pub fn det(a: &[f64], d: usize) -> f64 {
    if d == 1 {
        return a[0];
    }
    let mut total = 0.0;
    for j in 0..d {
        let minor: Vec<f64> = (1..d)
            .flat_map(|r| (0..d).filter(move |&c| c != j).map(move |c| (r, c)))
            .map(|(r, c)| a[r * d + c])
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * a[j] * det(&minor, d - 1);
    }
    total
}

/// Coefficients of `det(λI − A)`, lowest degree first, from sums of
/// principal minors.
pub fn char_poly(a: &[f64], d: usize) -> Vec<f64> {
    let mut coeffs = vec![0.0; d + 1];
    coeffs[d] = 1.0;
    for mask in 1u32..(1 << d) {
        let idx: Vec<usize> = (0..d).filter(|&i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let sub: Vec<f64> = idx.iter().flat_map(|&r| idx.iter().map(move |&c| a[r * d + c])).collect();
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        coeffs[d - k] += sign * det(&sub, k);
    }
    coeffs
}

pub fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &ci)| i as f64 * ci).collect()
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let (flo, fhi) = (poly_eval(c, lo), poly_eval(c, hi));
    if flo == 0.0 {
        return lo;
    }
    if fhi == 0.0 {
        return hi;
    }
    if flo.signum() == fhi.signum() {
        // No sign change: a double root sits at the better endpoint.
        return if flo.abs() < fhi.abs() { lo } else { hi };
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = poly_eval(c, mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ascending roots of a polynomial known to have only real roots. The
/// derivative's roots separate them, so each lies in its own bracket.
pub fn real_roots(c: &[f64]) -> Vec<f64> {
    let deg = c.len() - 1;
    let lead = c[deg];
    if deg == 1 {
        return vec![-c[0] / lead];
    }
    let bound = 1.0 + c[..deg].iter().map(|ci| (ci / lead).abs()).fold(0.0, f64::max);
    let mut cuts = vec![-bound];
    cuts.extend(real_roots(&derivative(c)));
    cuts.push(bound);
    cuts.windows(2).map(|w| bisect(c, w[0], w[1])).collect()
}

/// Spectral norm of a symmetric matrix by power iteration on `A²`.
pub fn power_norm(a: &[f64], d: usize, iters: usize) -> f64 {
    let mul = |v: &[f64]| -> Vec<f64> { (0..d).map(|i| (0..d).map(|j| a[i * d + j] * v[j]).sum()).collect() };
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * i as f64).collect();
    let mut est = 0.0;
    for _ in 0..iters {
        let w = mul(&mul(&v));
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        est = norm.sqrt() / v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    est
}

/// Orthonormal columns (column-major `d × k`) by classical Gram–Schmidt on
/// Gaussian vectors.
pub fn random_orthonormal(rng: &mut impl Rng, d: usize, k: usize) -> Vec<f64> {
    let mut q: Vec<f64> = Vec::with_capacity(d * k);
    while q.len() < d * k {
        let mut v = gaussian(rng, d);
        for _ in 0..2 {
            for j in 0..q.len() / d {
                let col = &q[j * d..(j + 1) * d];
                let c: f64 = col.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(col).for_each(|(vi, ci)| *vi -= c * ci);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            q.extend(v.iter().map(|x| x / n));
        }
    }
    q
}

/// Row-major `Q Qᵀ` for column-major `d × k` `Q`.
pub fn projector_matrix(q: &[f64], d: usize) -> Vec<f64> {
    let k = q.len() / d;
    let mut p = vec![0.0; d * d];
    for j in 0..k {
        let col = &q[j * d..(j + 1) * d];
        for r in 0..d {
            for c in 0..d {
                p[r * d + c] += col[r] * col[c];
            }
        }
    }
    p
}

pub fn frobenius_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Row-major `x xᵀ`.
pub fn outer(x: &[f64]) -> Vec<f64> {
    x.iter().flat_map(|a| x.iter().map(move |b| a * b)).collect()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
