//! Shared oracles and fixtures for the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

use bayes_ab::distributions::{BetaParams, GammaParams};
use bayes_ab::experiment::{parse_experiment, ExperimentSpec};
use bayes_ab::models::{
    posterior_aggregated, posterior_one_option, AggregatedObservations, OneOptionObservations,
    PosteriorKind, VariantPosterior,
};
use bayes_ab::RngStream;
use rand::Rng;
use rand_distr::{Distribution, Exp};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Standard error of the sample variance, estimated from the sample's own
/// fourth central moment.
pub fn variance_se(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2) / n).sqrt()
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n * m) as f64).sqrt()
}

/// Numerically normalizes `exp(log_kernel)` on `grid` with the trapezoid rule.
pub fn normalize_on_grid(grid: &[f64], log_kernel: impl Fn(f64) -> f64) -> Vec<f64> {
    let logs: Vec<f64> = grid.iter().map(|&x| log_kernel(x)).collect();
    let peak = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let unnorm: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
    let area: f64 = grid
        .windows(2)
        .zip(unnorm.windows(2))
        .map(|(x, u)| 0.5 * (x[1] - x[0]) * (u[0] + u[1]))
        .sum();
    unnorm.iter().map(|u| u / area).collect()
}

/// `k ln x` with the convention `0 ln 0 = 0`.
pub fn xlogy(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * x.ln()
    }
}

/// Quantile of Beta(a, b) by numerically integrating its kernel on a fine
/// grid over `[lo, hi]` and inverting the cumulative trapezoid sums.
pub fn beta_quantile_numeric(a: f64, b: f64, q: f64, lo: f64, hi: f64) -> f64 {
    let points = 200_001;
    let grid: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let pdf = normalize_on_grid(&grid, |x| xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x));
    let mut cum = 0.0;
    for i in 1..points {
        let step = 0.5 * (grid[i] - grid[i - 1]) * (pdf[i] + pdf[i - 1]);
        if cum + step >= q {
            let frac = (q - cum) / step;
            return grid[i - 1] + frac * (grid[i] - grid[i - 1]);
        }
        cum += step;
    }
    hi
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn load(name: &str) -> ExperimentSpec {
    let bytes = std::fs::read(data_path(name)).expect("fixture exists");
    parse_experiment(&bytes).expect("fixture parses")
}

pub const ORIGINAL_CONVERSIONS: [u64; 9] = [50, 5, 5, 28, 7, 5, 20, 1, 6];
pub const PROGRESSIVE_CONVERSIONS: [u64; 9] = [28, 3, 6, 30, 6, 5, 27, 6, 3];
pub const ORIGINAL_VALUES: [f64; 9] = [
    27.95, 47.95, 63.95, 35.95, 63.95, 79.95, 79.95, 151.95, 223.95,
];
pub const PROGRESSIVE_VALUES: [f64; 9] = [
    34.95, 59.95, 79.95, 37.95, 67.95, 84.95, 69.95, 132.95, 195.95,
];

const GRID_POINTS: usize = 2000;

fn unit_grid() -> Vec<f64> {
    (0..GRID_POINTS)
        .map(|i| i as f64 / (GRID_POINTS - 1) as f64)
        .collect()
}

pub fn beta_rate(post: &VariantPosterior) -> BetaParams {
    match post.kind {
        PosteriorKind::OneOption { rate, .. } => rate,
        _ => unreachable!(),
    }
}

/// Largest pointwise gap between the numerically normalized prior x
/// binomial-likelihood product and the analytic Beta posterior, for 50 random
/// (prior, N, C) tuples. Tuples whose posterior is narrower than ten grid
/// steps cannot be resolved by a 2000-point grid and are redrawn.
pub fn beta_grid_sup_errors() -> Vec<f64> {
    let grid = unit_grid();
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let mut rng = RngStream::new(2024);
    let mut errors = Vec::new();
    while errors.len() < 50 {
        let a = rng.random_range(1.0..10.0);
        let b = rng.random_range(1.0..10.0);
        let n = rng.random_range(0..=1000u64);
        let c = rng.random_range(0..=n);
        let analytic = BetaParams { a: a + c as f64, b: b + (n - c) as f64 };
        if analytic.variance().sqrt() < 10.0 * step {
            continue;
        }
        let brute = normalize_on_grid(&grid, |x| {
            xlogy(a - 1.0, x) + xlogy(b - 1.0, 1.0 - x) + xlogy(c as f64, x) + xlogy((n - c) as f64, 1.0 - x)
        });
        let post = posterior_one_option(
            &BetaParams::new(a, b).unwrap(),
            &OneOptionObservations::new("v", n, c),
        )
        .unwrap();
        let rate = beta_rate(&post);
        let err = grid
            .iter()
            .zip(&brute)
            .map(|(&x, &d)| (rate.pdf(x) - d).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    errors
}

/// Same comparison for the Gamma-Exponential update of the per-sale revenue
/// rate, on 50 random (prior, observations) instances.
pub fn gamma_grid_sup_errors() -> Vec<f64> {
    let mut rng = RngStream::new(77);
    let mut errors = Vec::new();
    for _ in 0..50 {
        let alpha0 = rng.random_range(1.0..5.0);
        let beta0 = rng.random_range(0.5..5.0);
        let true_rate = rng.random_range(0.2..5.0);
        let count = rng.random_range(0..=50u64);
        let exp = Exp::new(true_rate).unwrap();
        let total: f64 = (0..count).map(|_| exp.sample(&mut rng)).sum();

        let post = posterior_aggregated(
            &BetaParams::uniform(),
            &GammaParams::new(alpha0, beta0).unwrap(),
            &AggregatedObservations {
                name: "v".into(),
                visitors: count,
                conversions: count,
                revenue_total: total,
                cost_per_visitor: 0.0,
            },
        )
        .unwrap();
        let PosteriorKind::Aggregated { revenue_rate, .. } = post.kind else { unreachable!() };

        let shape = alpha0 + count as f64;
        let rate = beta0 + total;
        let upper = shape / rate + 12.0 * shape.sqrt() / rate;
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|k| upper * k as f64 / (GRID_POINTS - 1) as f64)
            .collect();
        let brute = normalize_on_grid(&grid, |theta| {
            xlogy(alpha0 - 1.0, theta) - beta0 * theta + xlogy(count as f64, theta) - theta * total
        });
        let err = grid
            .iter()
            .zip(&brute)
            .map(|(&x, &d)| (revenue_rate.pdf(x) - d).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    errors
}
