use csl::datagen::DataKind;
use csl::harness::{run_compare_hmt, run_convergence, run_moments_check, run_sweep, Algorithm, ExperimentConfig, SweepAxis};

fn medians(out: &csl::harness::ExperimentOutput) -> Vec<f64> {
    out.summary.iter().map(|r| r.median_error).collect()
}

fn inversions(v: &[f64]) -> usize {
    v.windows(2).filter(|w| w[1] > w[0]).count()
}

#[test]
fn convergence_errors_positive_and_decreasing() {
    let cfg = ExperimentConfig {
        n_grid: vec![250, 1000, 4000],
        trials: 9,
        master_seed: 1,
        ..Default::default()
    };
    let out = run_convergence(&cfg).unwrap();
    assert_eq!(out.records.len(), 2 * 3 * 9);
    assert!(out.records.iter().all(|r| r.error > 0.0 && r.error <= 1.0));
    for id in ["convergence_exact_low_rank", "convergence_spiked"] {
        let curve: Vec<f64> = out.summary.iter().filter(|r| r.experiment == id).map(|r| r.median_error).collect();
        assert_eq!(curve.len(), 3);
        assert_eq!(inversions(&curve), 0, "{id}: {curve:?}");
    }
}

#[test]
fn full_measurement_recovers_exactly() {
    let cfg = ExperimentConfig {
        kind: Some(DataKind::ExactLowRank),
        d: 8,
        m: 8,
        n_grid: vec![100, 400],
        trials: 4,
        ..Default::default()
    };
    let out = run_convergence(&cfg).unwrap();
    assert!(out.records.iter().all(|r| r.error <= 1e-8), "{:?}", medians(&out));
}

#[test]
fn more_measurements_help() {
    let cfg = ExperimentConfig {
        n: 2000,
        m_grid: vec![2, 4, 8, 12],
        trials: 11,
        master_seed: 2,
        ..Default::default()
    };
    let v = medians(&run_sweep(&cfg, SweepAxis::M).unwrap());
    assert!(inversions(&v) <= 1, "{v:?}");
    assert!(v[3] < v[0]);
}

#[test]
fn larger_gap_helps() {
    let cfg = ExperimentConfig {
        n: 2000,
        gamma_grid: vec![0.25, 0.5, 1.0, 2.0],
        trials: 11,
        master_seed: 3,
        ..Default::default()
    };
    let v = medians(&run_sweep(&cfg, SweepAxis::Gamma).unwrap());
    assert!(inversions(&v) <= 1, "{v:?}");
    assert!(v[3] < v[0]);
}

#[test]
fn single_point_sweeps() {
    let cfg = ExperimentConfig {
        n: 300,
        k_grid: vec![2],
        d_grid: vec![12],
        trials: 2,
        ..Default::default()
    };
    assert_eq!(run_sweep(&cfg, SweepAxis::K).unwrap().summary.len(), 1);
    let d = run_sweep(&cfg, SweepAxis::D).unwrap();
    assert_eq!(d.summary.len(), 1);
    assert_eq!(d.records[0].d, 12);
}

#[test]
fn compare_counts_and_hmt_floor() {
    let cfg = ExperimentConfig {
        kind: Some(DataKind::Rank1Identical),
        k: 1,
        n_grid: vec![500, 4000],
        m_grid: vec![2, 4],
        trials: 5,
        master_seed: 4,
        ..Default::default()
    };
    let out = run_compare_hmt(&cfg).unwrap();
    assert_eq!(out.records.len(), 2 * 2 * 2 * 5);
    for r in out.summary.iter().filter(|r| r.algorithm == Algorithm::Hmt && r.m == 2) {
        assert!(r.median_error >= 0.3, "{r:?}");
    }
    for r in &out.records {
        assert_eq!(r.rescaled_error, (r.n as f64).sqrt() * r.error);
    }
}

#[test]
fn moments_check_passes_at_reference_and_edge() {
    for m in [2, 5] {
        let cfg = ExperimentConfig {
            d: 6,
            m,
            draws: 300_000,
            ..Default::default()
        };
        let report = run_moments_check(&cfg).unwrap();
        assert_eq!(report.checks.len(), 5);
        assert!(report.all_passed(), "m={m}: {:?}", report.checks);
    }
}
