mod common;

use wompolar::construct::{
    construct, estimate_statistics, exact_statistics, Method, SelectionMode,
};
use wompolar::SourceModel;

#[test]
fn exact_statistics_match_oracle_on_grid() {
    for s in [0.2, 0.6] {
        for t in [0.1, 0.5, 0.9] {
            let m = SourceModel::new(s, t).unwrap();
            for n in [1usize, 2, 4, 8] {
                let st = exact_statistics(&m, n).unwrap();
                let (ent, dev) = common::statistics(s, t, n);
                for i in 0..n {
                    assert!((st.entropy[i] - ent[i]).abs() < 1e-12);
                    assert!((st.half_deviation[i] - dev[i]).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn monte_carlo_is_consistent_with_exact() {
    for (s, t) in [(0.5, 0.5), (0.3, 0.7)] {
        let m = SourceModel::new(s, t).unwrap();
        let est = estimate_statistics(&m, 8, 50_000, 21).unwrap();
        let (ent, dev) = common::statistics(s, t, 8);
        for i in 0..8 {
            assert!(
                (est.half_deviation[i] - dev[i]).abs()
                    <= 4.0 * est.half_deviation_stderr[i] + 1e-12,
                "a_{i}: {} vs {}",
                est.half_deviation[i],
                dev[i]
            );
            assert!(
                (est.entropy[i] - ent[i]).abs() <= 4.0 * est.entropy_stderr[i] + 1e-12,
                "H_{i}: {} vs {}",
                est.entropy[i],
                ent[i]
            );
        }
    }
}

#[test]
fn stderr_shrinks_with_root_of_samples() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let a = estimate_statistics(&m, 64, 20_000, 5).unwrap();
    let b = estimate_statistics(&m, 64, 40_000, 5).unwrap();
    let ratio = b.mean_half_deviation_stderr() / a.mean_half_deviation_stderr();
    assert!(
        (ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.05,
        "ratio {ratio}"
    );
}

#[test]
fn monte_carlo_is_deterministic_per_seed() {
    let m = SourceModel::new(0.4, 0.6).unwrap();
    let a = estimate_statistics(&m, 32, 4_000, 9).unwrap();
    let b = estimate_statistics(&m, 32, 4_000, 9).unwrap();
    let c = estimate_statistics(&m, 32, 4_000, 10).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.half_deviation, c.half_deviation);
}

#[test]
fn selected_deviation_polarizes_with_length() {
    let m = SourceModel::new(0.5, 0.5).unwrap();
    let worst: Vec<f64> = [8u32, 10, 12]
        .iter()
        .map(|&log| {
            let set = construct(
                &m,
                1 << log,
                Method::MonteCarlo,
                10_000,
                3,
                SelectionMode::TargetRate(0.8),
            )
            .unwrap();
            set.stats
                .unwrap()
                .half_deviation
                .iter()
                .cloned()
                .fold(0.0, f64::max)
        })
        .collect();
    assert!(worst.windows(2).all(|w| w[1] <= w[0]), "{worst:?}");
}
