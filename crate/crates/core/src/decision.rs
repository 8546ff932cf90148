//! Decision metrics over paired posterior draws.
//!
//! Every metric compares sample vectors index by index: draw `j` of one
//! variant is paired with draw `j` of the other.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::MetricSamples;

fn check_lengths(y1: &[f64], y2: &[f64]) -> Result<()> {
    if y1.len() != y2.len() {
        return Err(Error::LengthMismatch {
            left: y1.len(),
            right: y2.len(),
        });
    }
    if y1.is_empty() {
        return Err(Error::EmptyInput("sample vectors"));
    }
    Ok(())
}

/// Fraction of paired draws with `y1[j] > y2[j]`.
pub fn prob_pairwise(y1: &[f64], y2: &[f64]) -> Result<f64> {
    check_lengths(y1, y2)?;
    let wins = y1.iter().zip(y2).filter(|(a, b)| a > b).count();
    Ok(wins as f64 / y1.len() as f64)
}

/// Number of draws in which each variant is the strict joint argmax.
/// Ties go to the lowest index.
fn best_counts(samples: &MetricSamples) -> Result<Vec<u64>> {
    let rows = samples.rows();
    if rows.len() < 2 {
        return Err(Error::FewerThanTwoVariants(rows.len()));
    }
    let mut counts = vec![0u64; rows.len()];
    for j in 0..samples.n() {
        let mut best = 0;
        for i in 1..rows.len() {
            if rows[i][j] > rows[best][j] {
                best = i;
            }
        }
        counts[best] += 1;
    }
    Ok(counts)
}

/// Probability that each variant has the largest metric among all variants.
pub fn prob_best(samples: &MetricSamples) -> Result<Vec<f64>> {
    let n = samples.n() as f64;
    Ok(best_counts(samples)?
        .into_iter()
        .map(|c| c as f64 / n)
        .collect())
}

/// Mean and equal-tailed 95% interval of a relative change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uplift {
    pub mean: f64,
    pub ci95: [f64; 2],
}

/// Relative differences `(num[j] - den[j]) / den[j]`, skipping zero denominators.
fn relative_differences(num: &[f64], den: &[f64]) -> Result<Vec<f64>> {
    check_lengths(num, den)?;
    let rel: Vec<f64> = num
        .iter()
        .zip(den)
        .filter(|(_, &d)| d != 0.0)
        .map(|(&n, &d)| (n - d) / d)
        .collect();
    if rel.is_empty() {
        return Err(Error::AllReferenceSamplesZero);
    }
    Ok(rel)
}

/// Expected relative improvement of `y1` over the reference `y2`.
pub fn expected_uplift(y1: &[f64], y2: &[f64]) -> Result<Uplift> {
    let mut rel = relative_differences(y1, y2)?;
    let mean = rel.iter().sum::<f64>() / rel.len() as f64;
    let (lo, hi) = interval_in_place(&mut rel, 0.95);
    Ok(Uplift { mean, ci95: [lo, hi] })
}

/// Expected relative regret of choosing `y1` when `y2` might be better:
/// the mean of `max((y2[j] - y1[j]) / y1[j], 0)`.
pub fn expected_loss(y1: &[f64], y2: &[f64]) -> Result<f64> {
    let rel = relative_differences(y2, y1)?;
    Ok(rel.iter().map(|r| r.max(0.0)).sum::<f64>() / rel.len() as f64)
}

/// Equal-tailed credible interval holding `mass` of the samples.
pub fn credible_interval(samples: &[f64], mass: f64) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("credible interval needs samples"));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "credible mass must lie in (0, 1), got {mass}"
        )));
    }
    let mut sorted = samples.to_vec();
    Ok(interval_in_place(&mut sorted, mass))
}

fn interval_in_place(samples: &mut [f64], mass: f64) -> (f64, f64) {
    samples.sort_unstable_by(f64::total_cmp);
    let tail = (1.0 - mass) / 2.0;
    (quantile_sorted(samples, tail), quantile_sorted(samples, 1.0 - tail))
}

/// Linear interpolation between order statistics.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub posterior_mean: f64,
    pub prob_best: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prob_beat_baseline: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplift_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplift_ci95: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub metric: String,
    pub baseline: String,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub variants: Vec<ReportRow>,
}

impl DecisionReport {
    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.variants.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table, numbers rounded to two decimals.
    pub fn to_table(&self) -> String {
        const HEADERS: [&str; 6] = [
            "variant",
            "prob_best",
            "prob_beat_baseline",
            "uplift_mean",
            "uplift_ci95",
            "expected_loss",
        ];
        let fmt = |x: f64| {
            let s = format!("{x:.2}");
            // -0.00 reads as a sign error in a table
            if s == "-0.00" { "0.00".to_owned() } else { s }
        };
        let opt = |x: Option<f64>| x.map(fmt).unwrap_or_default();
        let cells: Vec<[String; 6]> = self
            .variants
            .iter()
            .map(|r| {
                [
                    if r.name == self.baseline {
                        format!("{} (BL)", r.name)
                    } else {
                        r.name.clone()
                    },
                    fmt(r.prob_best),
                    opt(r.prob_beat_baseline),
                    opt(r.uplift_mean),
                    r.uplift_ci95
                        .map(|[lo, hi]| format!("[{}, {}]", fmt(lo), fmt(hi)))
                        .unwrap_or_default(),
                    opt(r.expected_loss),
                ]
            })
            .collect();
        let mut widths = HEADERS.map(str::len);
        for row in &cells {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cols: Vec<&str>| {
            let mut s = String::new();
            for (i, (c, w)) in cols.iter().zip(widths).enumerate() {
                if i == 0 {
                    s.push_str(&format!("{c:<w$}"));
                } else {
                    s.push_str(&format!("  {c:>w$}"));
                }
            }
            s.trim_end().to_owned() + "\n"
        };
        let mut out = format!("metric: {}  baseline: {}  samples: {}", self.metric, self.baseline, self.samples);
        if let Some(seed) = self.seed {
            out.push_str(&format!("  seed: {seed}"));
        }
        out.push('\n');
        out.push_str(&line(HEADERS.to_vec()));
        let total: usize = widths.iter().sum::<usize>() + 2 * (widths.len() - 1);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for row in &cells {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

/// Assembles the full decision table with `baseline` as the reference.
pub fn build_report(samples: &MetricSamples, baseline: &str) -> Result<DecisionReport> {
    let base = samples
        .row(baseline)
        .ok_or_else(|| Error::UnknownBaseline(baseline.to_owned()))?;
    let best = prob_best(samples)?;
    let mut variants = Vec::with_capacity(samples.variant_count());
    for ((name, row), prob_best) in samples.names().iter().zip(samples.rows()).zip(best) {
        let posterior_mean = row.iter().sum::<f64>() / row.len() as f64;
        let mut report_row = ReportRow {
            name: name.clone(),
            posterior_mean,
            prob_best,
            prob_beat_baseline: None,
            uplift_mean: None,
            uplift_ci95: None,
            expected_loss: None,
        };
        if name != baseline {
            let uplift = expected_uplift(row, base)?;
            report_row.prob_beat_baseline = Some(prob_pairwise(row, base)?);
            report_row.uplift_mean = Some(uplift.mean);
            report_row.uplift_ci95 = Some(uplift.ci95);
            report_row.expected_loss = Some(expected_loss(row, base)?);
        }
        variants.push(report_row);
    }
    Ok(DecisionReport {
        metric: samples.metric().to_string(),
        baseline: baseline.to_owned(),
        samples: samples.n(),
        seed: samples.seed(),
        variants,
    })
}
