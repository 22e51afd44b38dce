//! Acceptance criteria 1–10. Prints one line per criterion and exits
//! nonzero if any fails or overruns its time budget.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;

use csl::datagen::DataKind;
use csl::estimator::{chat, exact_pca, measure_column, run_csl, CslOptions, MeasurementMode};
use csl::harness::{self, ExperimentConfig, ExperimentKind, RunOutput};
use csl::linalg::{eig_sym, subspace_distance, DataMatrix, SymmetricMatrix};
use csl::randgen::{beta_sample, mix64, random_projection, sphere_vector, BetaParams, SeedSpec};
use csl::theory::{
    cost_model, error_bound, moment_omega2, moment_yzyz, moment_yzzy, sample_complexity, variance_bound,
    variance_bracket_bound, ProblemParams, Scheme,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit(d: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..d).map(|i| 1.0 + i as f64).collect();
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= n);
    x
}

fn unbiasedness() -> Outcome {
    let (d, m, draws) = (8usize, 2usize, 100_000u64);
    let x = unit(d);
    let mut sum = SymmetricMatrix::zeros(d);
    for t in 0..draws {
        let (y, z) = measure_column(&x, t, m, 11, MeasurementMode::Paired)
            .map_err(|e| e.to_string())?
            .ok_or("zero column")?;
        sum += &chat(&y, &z).map_err(|e| e.to_string())?;
    }
    let scale = (d * d) as f64 / ((m * m) as f64 * draws as f64);
    let mean: Vec<f64> = sum.as_slice().iter().map(|v| v * scale).collect();
    let dist = common::frobenius_diff(&mean, &common::outer(&x));
    ensure(dist <= 0.03, || format!("Frobenius distance {dist:.4} > 0.03"))?;
    Ok(format!("‖mean − xxᵀ‖_F = {dist:.4} (≤ 0.03)"))
}

fn rel_frob(mc: &[f64], closed: &SymmetricMatrix) -> f64 {
    common::frobenius_diff(mc, closed.as_slice()) / closed.frobenius_norm()
}

fn moment_oracle() -> Outcome {
    let (d, m, draws) = (6usize, 2usize, 1_000_000usize);
    let x = unit(d);
    let mut yzyz = vec![0.0; d * d];
    let mut yzzy = vec![0.0; d * d];
    for i in 0..draws as u64 {
        let y = random_projection(SeedSpec::new(21, 2 * i), d, m).map_err(|e| e.to_string())?.apply(&x);
        let z = random_projection(SeedSpec::new(21, 2 * i + 1), d, m).map_err(|e| e.to_string())?.apply(&x);
        let zy: f64 = z.iter().zip(&y).map(|(a, b)| a * b).sum();
        let zz: f64 = z.iter().map(|a| a * a).sum();
        for r in 0..d {
            for c in 0..d {
                yzyz[r * d + c] += zy * y[r] * z[c];
                yzzy[r * d + c] += zz * y[r] * y[c];
            }
        }
    }
    let inv = 1.0 / draws as f64;
    yzyz.iter_mut().chain(yzzy.iter_mut()).for_each(|v| *v *= inv);
    let e1 = rel_frob(&yzyz, &moment_yzyz(&x, m).map_err(|e| e.to_string())?);
    let e2 = rel_frob(&yzzy, &moment_yzzy(&x, m).map_err(|e| e.to_string())?);
    ensure(e1 <= 0.05, || format!("E[y zᵀ y zᵀ] relative error {e1:.4} > 0.05"))?;
    ensure(e2 <= 0.05, || format!("E[y zᵀ z yᵀ] relative error {e2:.4} > 0.05"))?;

    let p = BetaParams::for_projection(d, m).map_err(|e| e.to_string())?;
    let (mut s1, mut s2) = (0.0, 0.0);
    for i in 0..draws as u64 {
        let w2 = beta_sample(SeedSpec::new(22, i), p).powi(2);
        s1 += w2;
        s2 += w2 * w2;
    }
    let n = draws as f64;
    let mean = s1 / n;
    let se = ((s2 / n - mean * mean) / (n - 1.0)).sqrt();
    let closed = moment_omega2(d, m).map_err(|e| e.to_string())?;
    let z = (mean - closed).abs() / se;
    ensure(z <= 4.0, || format!("E ω² off by {z:.2} standard errors"))?;
    Ok(format!("yzyz rel {e1:.4}, yzzy rel {e2:.4}, ω² {z:.2} SE"))
}

fn variance_bound_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in 2..=256usize {
        for m in 1..d {
            let p = ProblemParams::new(d, m, 1, 1, 1.0, 1.0, 0.5).map_err(|e| e.to_string())?;
            let lhs = variance_bracket_bound(&p).map_err(|e| e.to_string())?;
            let rhs = variance_bound(&p);
            ensure(lhs <= rhs, || format!("bracket {lhs} > {rhs} at d={d}, m={m}"))?;
            worst = worst.max(lhs / rhs);
        }
    }

    let (d, m, n, per_col) = (6usize, 2usize, 50usize, 20_000u64);
    let scale = (d * d) as f64 / (n as f64 * (m * m) as f64);
    let mut sum = SymmetricMatrix::zeros(d);
    for t in 0..n as u64 {
        let x = sphere_vector(SeedSpec::new(31, t), d).map_err(|e| e.to_string())?;
        for j in 0..per_col {
            let (y, z) = measure_column(&x, mix64(t) ^ j, m, 32, MeasurementMode::Paired)
                .map_err(|e| e.to_string())?
                .ok_or("zero column")?;
            let mut inc = chat(&y, &z).map_err(|e| e.to_string())?.scaled(scale);
            inc.add_outer(&x, -1.0 / n as f64);
            sum += &inc.squared();
        }
    }
    sum.scale(1.0 / per_col as f64);
    let sigma2 = common::power_norm(sum.as_slice(), d, 500);
    let bound = 22.0 / (m * n) as f64;
    ensure(sigma2 <= bound, || format!("empirical variance {sigma2:.4} > bound {bound:.4}"))?;
    Ok(format!(
        "grid max bracket/bound = {worst:.3}; empirical ‖ΣE X_t²‖ = {sigma2:.4} ≤ {bound:.3}"
    ))
}

fn records(cfg: &ExperimentConfig, exp: ExperimentKind) -> Result<harness::ExperimentOutput, String> {
    harness::run_records(cfg, exp).map_err(|e| e.to_string())
}

fn summary_error(out: &harness::ExperimentOutput, alg: harness::Algorithm, n: usize) -> Result<(f64, f64), String> {
    out.summary
        .iter()
        .find(|r| r.algorithm == alg && r.n == n)
        .map(|r| (r.median_error, r.median_rescaled_error))
        .ok_or_else(|| format!("no summary row for {alg} at n={n}"))
}

fn rate() -> Outcome {
    let cfg = ExperimentConfig {
        kind: Some(DataKind::ExactLowRank),
        d: 20,
        k: 2,
        m: 4,
        n_grid: vec![250, 2500, 10_000],
        trials: 20,
        master_seed: 4,
        ..Default::default()
    };
    let out = records(&cfg, ExperimentKind::Convergence)?;
    let (_, r250) = summary_error(&out, harness::Algorithm::Csl, 250)?;
    let (e2500, _) = summary_error(&out, harness::Algorithm::Csl, 2500)?;
    let (e1e4, r1e4) = summary_error(&out, harness::Algorithm::Csl, 10_000)?;
    let flat = r1e4 / r250;
    let ratio = e1e4 / e2500;
    ensure((0.5..=2.0).contains(&flat), || format!("rescaled ratio {flat:.3} outside [0.5, 2]"))?;
    ensure((0.35..=0.70).contains(&ratio), || format!("err(1e4)/err(2500) = {ratio:.3} outside [0.35, 0.70]"))?;
    Ok(format!(
        "√n·err {r250:.3} → {r1e4:.3} (ratio {flat:.3}); err(1e4)/err(2500) = {ratio:.3}"
    ))
}

fn separation() -> Outcome {
    let cfg = ExperimentConfig {
        kind: Some(DataKind::Rank1Identical),
        d: 20,
        k: 1,
        n_grid: vec![10_000],
        m_grid: vec![2],
        trials: 20,
        master_seed: 5,
        ..Default::default()
    };
    let out = records(&cfg, ExperimentKind::CompareHmt)?;
    let (csl, _) = summary_error(&out, harness::Algorithm::Csl, 10_000)?;
    let (hmt, _) = summary_error(&out, harness::Algorithm::Hmt, 10_000)?;
    ensure(csl <= 0.15, || format!("CSL median error {csl:.3} > 0.15"))?;
    ensure(hmt >= 0.3, || format!("HMT median error {hmt:.3} < 0.3"))?;
    Ok(format!("median error csl {csl:.4}, hmt {hmt:.4}"))
}

fn exact_recovery() -> Outcome {
    let mut rng = common::rng(6);
    let mut worst: f64 = 0.0;
    for i in 0..10u64 {
        let d = rng.random_range(3..=12);
        let k = rng.random_range(1..d);
        let n = rng.random_range(d..=200);
        let cols: Vec<Vec<f64>> = (0..n).map(|_| common::gaussian(&mut rng, d)).collect();
        let x = DataMatrix::from_columns(&cols).map_err(|e| e.to_string())?;
        let est = run_csl(&x, d, k, i, CslOptions::default()).map_err(|e| e.to_string())?;
        let pca = exact_pca(&x, k).map_err(|e| e.to_string())?;
        let dist = subspace_distance(&est.projector, &pca.projector).map_err(|e| e.to_string())?;
        ensure(dist <= 1e-8, || format!("instance {i} (d={d}, k={k}, n={n}): distance {dist:e}"))?;
        worst = worst.max(dist);
    }
    Ok(format!("max distance {worst:.2e} over 10 instances"))
}

fn bound_consistency() -> Outcome {
    let mut rng = common::rng(7);
    for i in 0..50 {
        let d = rng.random_range(2..=200usize);
        let m = rng.random_range(1..=d);
        let k = rng.random_range(1..d);
        let mu = rng.random_range(0.1..10.0);
        let gamma = rng.random_range(0.01..5.0);
        let delta = rng.random_range(0.001..0.5);
        let eps = rng.random_range(0.01..1.0);
        let mut p = ProblemParams::new(d, m, k, 1, mu, gamma, delta).map_err(|e| e.to_string())?;
        p.n = sample_complexity(&p, eps).map_err(|e| e.to_string())? as usize;
        let b = error_bound(&p);
        ensure(b <= 2.0 * eps, || format!("tuple {i}: bound {b} > 2ε = {}", 2.0 * eps))?;
    }

    let base = ProblemParams::new(20, 4, 2, 1000, 1.0, 1.0, 0.1).map_err(|e| e.to_string())?;
    let eb = error_bound(&base);
    let mut checks = 0;
    let mut grid = |name: &str, vary: &dyn Fn(f64) -> ProblemParams, increasing: bool| -> Result<(), String> {
        let vals: Vec<f64> = (1..=8).map(|i| error_bound(&vary(i as f64))).collect();
        for w in vals.windows(2) {
            let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
            ensure(ok, || format!("error_bound not monotone in {name}: {vals:?}"))?;
        }
        checks += 1;
        Ok(())
    };
    grid("n", &|s| ProblemParams { n: 1000 * s as usize, ..base }, false)?;
    grid("m", &|s| ProblemParams { m: s as usize, ..base }, false)?;
    grid("gamma", &|s| ProblemParams { gamma_k: 0.25 * s, ..base }, false)?;
    grid("mu", &|s| ProblemParams { mu: 0.25 * s, ..base }, true)?;
    grid("d", &|s| ProblemParams { d: 10 * s as usize, ..base }, true)?;
    grid("delta", &|s| ProblemParams { delta: 0.1 / s, ..base }, true)?;
    Ok(format!("50 tuples within 2ε; {checks} monotone grids; base bound {eb:.4}"))
}

fn eigensolver() -> Outcome {
    let mut rng = common::rng(8);
    let (mut worst_val, mut worst_res): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let a = common::random_symmetric(&mut rng, 4);
        let mut roots = common::real_roots(&common::char_poly(&a, 4));
        roots.reverse();
        let m = SymmetricMatrix::from_row_major(4, a.clone()).map_err(|e| e.to_string())?;
        let e = eig_sym(&m).map_err(|e| e.to_string())?;
        for (j, (&l, &r)) in e.values().iter().zip(&roots).enumerate() {
            let dl = (l - r).abs();
            ensure(dl <= 1e-8, || format!("matrix {i}: λ{j} = {l}, root {r}"))?;
            worst_val = worst_val.max(dl);
            let v = e.vector(j);
            let av = m.mul_vec(v);
            let res = av.iter().zip(v).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
            ensure(res <= 1e-8, || format!("matrix {i}: residual {res:e} for λ{j}"))?;
            worst_res = worst_res.max(res);
        }
    }
    Ok(format!("max |Δλ| {worst_val:.2e}, max residual {worst_res:.2e}"))
}

fn csv_bytes(cfg: &ExperimentConfig, exp: ExperimentKind) -> Result<Vec<u8>, String> {
    let out = harness::run(cfg, exp).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    match &out {
        RunOutput::Records(o) => {
            harness::write_csv(&mut buf, &o.records).map_err(|e| e.to_string())?;
            harness::write_summary(&mut buf, &o.summary).map_err(|e| e.to_string())?;
        }
        RunOutput::Moments(r) => r.write(&mut buf).map_err(|e| e.to_string())?,
        RunOutput::Cost(rows) => harness::write_cost_report(&mut buf, rows).map_err(|e| e.to_string())?,
        RunOutput::Matrix { text } => buf.extend_from_slice(text.as_bytes()),
    }
    Ok(buf)
}

fn determinism() -> Outcome {
    let cfg = ExperimentConfig {
        d: 8,
        k: 2,
        m: 3,
        n: 300,
        n_grid: vec![100, 300],
        m_grid: vec![2, 4],
        d_grid: vec![6, 8],
        k_grid: vec![1, 2],
        gamma_grid: vec![0.5, 1.0],
        trials: 3,
        draws: 20_000,
        columns: 10,
        master_seed: 9,
        ..Default::default()
    };
    let exps = [
        ExperimentKind::CompareHmt,
        ExperimentKind::Convergence,
        ExperimentKind::SweepM,
        ExperimentKind::SweepD,
        ExperimentKind::SweepK,
        ExperimentKind::SweepGamma,
        ExperimentKind::MomentsCheck,
        ExperimentKind::CostReport,
        ExperimentKind::ExportData,
    ];
    for exp in exps {
        let a = csv_bytes(&cfg, exp)?;
        let b = csv_bytes(&cfg, exp)?;
        let c = csv_bytes(&ExperimentConfig { sequential: true, ..cfg.clone() }, exp)?;
        ensure(a == b, || format!("{exp}: repeated run differs"))?;
        ensure(a == c, || format!("{exp}: sequential run differs"))?;
    }
    Ok(format!("{} experiments byte-identical across repeated and sequential runs", exps.len()))
}

fn cost() -> Outcome {
    let mut rows = 0;
    for n in [1u64, 7, 100, 10_000, 1_000_000] {
        for d in [1u64, 2, 20, 256, 4096] {
            for m in [1, 2, d / 2, d - 1, d] {
                if m == 0 || m > d {
                    continue;
                }
                let cfg = ExperimentConfig {
                    n: n as usize,
                    d: d as usize,
                    m: m as usize,
                    ..Default::default()
                };
                let RunOutput::Cost(table) = harness::run(&cfg, ExperimentKind::CostReport).map_err(|e| e.to_string())?
                else {
                    return Err("cost_report returned the wrong output".into());
                };
                let get = |s: Scheme| table.iter().find(|r| r.scheme == s).map(|r| r.cost).ok_or("missing row");
                let csl = get(Scheme::Csl)?;
                let shared = get(Scheme::Shared)?;
                ensure((csl.measurements, csl.communication) == (2 * m * n, 2 * n * d), || {
                    format!("csl row ({}, {}) at n={n}, d={d}, m={m}", csl.measurements, csl.communication)
                })?;
                ensure(shared.communication > csl.communication, || {
                    format!("shared communication not above csl at n={n}, d={d}, m={m}")
                })?;
                ensure(cost_model(Scheme::Naive, n, d, m).ok() == get(Scheme::Naive).ok(), || "naive row mismatch".into())?;
                rows += 1;
            }
        }
    }
    let reference = cost_model(Scheme::Csl, 100, 20, 2).map_err(|e| e.to_string())?;
    ensure((reference.measurements, reference.communication) == (400, 4000), || {
        format!("reference csl row {reference:?}")
    })?;
    Ok(format!("{rows} (n, d, m) points; csl (100, 20, 2) = (400, 4000)"))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "unbiasedness", budget: secs(10), run: unbiasedness },
        Criterion { id: 2, name: "moment oracle", budget: secs(60), run: moment_oracle },
        Criterion { id: 3, name: "variance bound", budget: secs(30), run: variance_bound_check },
        Criterion { id: 4, name: "n^-1/2 rate", budget: secs(180), run: rate },
        Criterion { id: 5, name: "csl vs hmt separation", budget: secs(120), run: separation },
        Criterion { id: 6, name: "exact recovery at m = d", budget: secs(5), run: exact_recovery },
        Criterion { id: 7, name: "bound consistency", budget: secs(1), run: bound_consistency },
        Criterion { id: 8, name: "eigensolver oracle", budget: secs(5), run: eigensolver },
        Criterion { id: 9, name: "determinism", budget: None, run: determinism },
        Criterion { id: 10, name: "cost model", budget: None, run: cost },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("took {:.2?}, budget {b:.0?}", elapsed)),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {:>2} {:<24} {:>9.2?}  {detail}", c.id, c.name, elapsed);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
