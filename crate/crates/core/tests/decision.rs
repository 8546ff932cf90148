mod common;

use bayes_ab::decision::{
    build_report, credible_interval, expected_loss, expected_uplift, prob_best, prob_pairwise,
};
use bayes_ab::distributions::{sample_beta, BetaParams};
use bayes_ab::models::{Metric, MetricSamples};
use bayes_ab::RngStream;
use common::beta_quantile_numeric;
use proptest::prelude::*;
use rand::Rng;

fn beta_draws(a: f64, b: f64, n: usize, seed: u64) -> Vec<f64> {
    sample_beta(&BetaParams::new(a, b).unwrap(), n, &mut RngStream::new(seed)).unwrap()
}

fn named(rows: Vec<Vec<f64>>) -> MetricSamples {
    let names = (0..rows.len()).map(|i| format!("v{i}")).collect();
    MetricSamples::new(names, Metric::Value, rows, None).unwrap()
}

const N: usize = 200_000;

#[test]
fn identical_posteriors_split_evenly() {
    let y1 = beta_draws(140.0, 15006.0, N, 1);
    let y2 = beta_draws(140.0, 15006.0, N, 2);
    assert!((prob_pairwise(&y1, &y2).unwrap() - 0.5).abs() < 0.005);

    let up = expected_uplift(&y1, &y2).unwrap();
    assert!(up.mean > 0.0 && up.mean < 0.02, "uplift {}", up.mean);

    let y3 = beta_draws(140.0, 15006.0, N, 3);
    let best = prob_best(&named(vec![y1, y2, y3])).unwrap();
    for p in best {
        assert!((p - 1.0 / 3.0).abs() < 0.01);
    }
}

#[test]
fn jensen_gap_for_identical_posteriors() {
    // E[(X - Y) / Y] = E[X] E[1/Y] - 1 for independent X, Y; with X, Y ~ Beta(a, b)
    // and E[1/Y] = (a + b - 1) / (a - 1) this is (a + b - 1) a / ((a - 1)(a + b)) - 1.
    let (a, b) = (140.0, 15006.0);
    let exact = (a + b - 1.0) * a / ((a - 1.0) * (a + b)) - 1.0;
    assert!(exact > 0.0 && exact < 0.02);
    // brute force with ten million pairs
    let big = 10_000_000;
    let y1 = beta_draws(a, b, big, 31);
    let y2 = beta_draws(a, b, big, 32);
    let brute = y1.iter().zip(&y2).map(|(x, y)| (x - y) / y).sum::<f64>() / big as f64;
    assert!((brute - exact).abs() < 5e-4, "{brute} vs {exact}");
}

#[test]
fn beta_two_one_beats_uniform_two_thirds() {
    // P(X > Y) for X ~ Beta(2,1), Y ~ U(0,1) is the integral of 2x * x over [0, 1].
    let y1 = beta_draws(2.0, 1.0, N, 4);
    let y2 = beta_draws(1.0, 1.0, N, 5);
    assert!((prob_pairwise(&y1, &y2).unwrap() - 2.0 / 3.0).abs() < 0.005);

    // inverse-CDF brute force: Beta(2,1) is sqrt(U)
    let mut rng = RngStream::new(6);
    let big = 10_000_000;
    let wins = (0..big)
        .filter(|_| rng.random::<f64>().sqrt() > rng.random::<f64>())
        .count();
    assert!((wins as f64 / big as f64 - 2.0 / 3.0).abs() < 0.001);
}

#[test]
fn uniform_credible_interval() {
    let mut rng = RngStream::new(8);
    let u: Vec<f64> = (0..N).map(|_| rng.random::<f64>()).collect();
    let (lo, hi) = credible_interval(&u, 0.95).unwrap();
    assert!((lo - 0.025).abs() < 0.005 && (hi - 0.975).abs() < 0.005);
}

#[test]
fn beta_credible_interval_matches_numeric_quantiles() {
    let draws = beta_draws(140.0, 15006.0, N, 9);
    let (lo, hi) = credible_interval(&draws, 0.95).unwrap();
    let q_lo = beta_quantile_numeric(140.0, 15006.0, 0.025, 0.0, 0.03);
    let q_hi = beta_quantile_numeric(140.0, 15006.0, 0.975, 0.0, 0.03);
    assert!((lo - q_lo).abs() < 5e-4, "{lo} vs {q_lo}");
    assert!((hi - q_hi).abs() < 5e-4, "{hi} vs {q_hi}");
}

#[test]
fn two_variants_prob_best_equals_beat_baseline() {
    let base = beta_draws(128.0, 7941.0, N, 10);
    let chal = beta_draws(115.0, 7970.0, N, 11);
    let samples = MetricSamples::new(
        vec!["Original".into(), "Progressive".into()],
        Metric::Conversion,
        vec![base, chal],
        None,
    )
    .unwrap();
    let report = build_report(&samples, "Original").unwrap();
    let row = report.row("Progressive").unwrap();
    assert_eq!(row.prob_best, row.prob_beat_baseline.unwrap());
    let sum: f64 = report.variants.iter().map(|r| r.prob_best).sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn identical_variants_have_symmetric_loss() {
    let a = beta_draws(140.0, 15006.0, N, 12);
    let b = beta_draws(140.0, 15006.0, N, 13);
    let samples = named(vec![a.clone(), b.clone()]);
    let report = build_report(&samples, "v0").unwrap();
    assert!((report.variants[1].prob_best - 0.5).abs() < 0.01);
    let l_ab = expected_loss(&a, &b).unwrap();
    let l_ba = expected_loss(&b, &a).unwrap();
    assert!((l_ab - l_ba).abs() < 0.01 * l_ab.max(l_ba) + 1e-3);
}

fn tie_free(n: usize, v: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed);
    (0..v)
        .map(|_| (0..n).map(|_| 0.5 + rng.random::<f64>()).collect())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prob_best_sums_to_one(seed in any::<u64>(), v in 2usize..6, n in 1usize..300) {
        let best = prob_best(&named(tie_free(n, v, seed))).unwrap();
        let counts: f64 = best.iter().map(|p| p * n as f64).sum();
        prop_assert!((counts - n as f64).abs() < 1e-9);
        prop_assert!((best.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairwise_probabilities_are_complementary(seed in any::<u64>(), n in 1usize..300) {
        let rows = tie_free(n, 2, seed);
        let p12 = prob_pairwise(&rows[0], &rows[1]).unwrap();
        let p21 = prob_pairwise(&rows[1], &rows[0]).unwrap();
        prop_assert!((p12 + p21 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_variant_identity(seed in any::<u64>(), n in 1usize..300) {
        let rows = tie_free(n, 2, seed);
        let best = prob_best(&named(rows.clone())).unwrap();
        prop_assert_eq!(best[1], prob_pairwise(&rows[1], &rows[0]).unwrap());
    }

    #[test]
    fn loss_bounds_negative_uplift(seed in any::<u64>(), n in 1usize..300) {
        let rows = tie_free(n, 2, seed);
        let loss = expected_loss(&rows[0], &rows[1]).unwrap();
        let uplift = expected_uplift(&rows[1], &rows[0]).unwrap();
        prop_assert!(loss >= 0.0);
        prop_assert!(loss >= uplift.mean.max(0.0) - 1e-12);
    }

    #[test]
    fn relative_metrics_are_scale_free(seed in any::<u64>(), n in 1usize..200, k in 0u32..8) {
        // powers of two scale every float exactly
        let scale = f64::from(1u32 << k);
        let rows = tie_free(n, 3, seed);
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x * scale).collect()).collect();
        prop_assert_eq!(prob_best(&named(rows.clone())).unwrap(), prob_best(&named(scaled.clone())).unwrap());
        prop_assert_eq!(expected_uplift(&rows[1], &rows[0]).unwrap(), expected_uplift(&scaled[1], &scaled[0]).unwrap());
        prop_assert_eq!(expected_loss(&rows[1], &rows[0]).unwrap(), expected_loss(&scaled[1], &scaled[0]).unwrap());
    }
}
