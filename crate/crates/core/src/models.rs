//! Conjugate posteriors for the three experiment scenarios and Monte-Carlo
//! draws of each measure of interest.
//!
//! * one option: Beta prior on the conversion rate, binomial likelihood.
//! * multi options: Dirichlet prior over the K option rates plus the
//!   "no conversion" outcome, multinomial likelihood.
//! * aggregated: Beta-binomial conversion rate as in the one option case, and
//!   per-sale revenue modelled as exponential with a Gamma prior on its rate.
//!
//! Observations are ingested as sufficient statistics only.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Beta, Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{BetaParams, DirichletParams, DirichletSampler, GammaParams};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Monte-Carlo sample count used when none is given.
pub const DEFAULT_SAMPLES: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Probability that a visitor converts.
    Conversion,
    /// Value (e.g. revenue) per visitor, net of any non-conversion penalty.
    Value,
    /// Value per visitor minus cost per visitor.
    Gain,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Conversion => "conversion",
            Metric::Value => "value",
            Metric::Gain => "gain",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "conversion" => Ok(Metric::Conversion),
            "value" | "revenue" => Ok(Metric::Value),
            "gain" => Ok(Metric::Gain),
            other => Err(Error::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

fn check_amount(variant: &str, field: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "variant `{variant}`: {field} must be a non-negative number, got {value}"
        )))
    }
}

fn check_conversions(variant: &str, conversions: u64, visitors: u64) -> Result<()> {
    if conversions > visitors {
        return Err(Error::ConversionsExceedVisitors {
            variant: variant.to_owned(),
            conversions,
            visitors,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneOptionObservations {
    pub name: String,
    pub visitors: u64,
    pub conversions: u64,
    /// Value of one conversion, if the experiment records one.
    pub value: Option<f64>,
    /// Penalty paid for every visitor who does not convert.
    pub loss: f64,
}

impl OneOptionObservations {
    pub fn new(name: impl Into<String>, visitors: u64, conversions: u64) -> Self {
        Self {
            name: name.into(),
            visitors,
            conversions,
            value: None,
            loss: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_conversions(&self.name, self.conversions, self.visitors)?;
        if let Some(v) = self.value {
            check_amount(&self.name, "value", v)?;
        }
        check_amount(&self.name, "loss", self.loss)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiOptionObservations {
    pub name: String,
    pub visitors: u64,
    /// Conversions per option.
    pub conversions: Vec<u64>,
    /// Value per option, parallel to `conversions`.
    pub values: Option<Vec<f64>>,
    pub cost_per_visitor: f64,
    pub loss: f64,
}

impl MultiOptionObservations {
    pub fn options(&self) -> usize {
        self.conversions.len()
    }

    pub fn total_conversions(&self) -> u64 {
        self.conversions.iter().sum()
    }

    /// Sum over options of conversions times value.
    pub fn revenue_total(&self) -> Option<f64> {
        self.values.as_ref().map(|values| {
            self.conversions
                .iter()
                .zip(values)
                .map(|(&c, &v)| c as f64 * v)
                .sum()
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.conversions.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "variant `{}`: at least one option is required",
                self.name
            )));
        }
        check_conversions(&self.name, self.total_conversions(), self.visitors)?;
        if let Some(values) = &self.values {
            if values.len() != self.conversions.len() {
                return Err(Error::LengthMismatch {
                    left: self.conversions.len(),
                    right: values.len(),
                });
            }
            for &v in values {
                check_amount(&self.name, "values", v)?;
            }
        }
        check_amount(&self.name, "cost_per_visitor", self.cost_per_visitor)?;
        check_amount(&self.name, "loss", self.loss)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregatedObservations {
    pub name: String,
    pub visitors: u64,
    pub conversions: u64,
    /// Revenue summed over all conversions.
    pub revenue_total: f64,
    pub cost_per_visitor: f64,
}

impl AggregatedObservations {
    pub fn validate(&self) -> Result<()> {
        check_conversions(&self.name, self.conversions, self.visitors)?;
        check_amount(&self.name, "revenue_total", self.revenue_total)?;
        if self.conversions == 0 && self.revenue_total != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "variant `{}`: revenue_total must be 0 when there are no conversions",
                self.name
            )));
        }
        check_amount(&self.name, "cost_per_visitor", self.cost_per_visitor)
    }
}

/// Posterior for one variant, together with the value/cost metadata needed
/// to turn rate draws into value and gain draws.
#[derive(Debug, Clone, PartialEq)]
pub enum PosteriorKind {
    OneOption {
        rate: BetaParams,
        value: Option<f64>,
        loss: f64,
    },
    MultiOptions {
        /// K option rates followed by the no-conversion rate.
        rates: DirichletParams,
        values: Option<Vec<f64>>,
        cost_per_visitor: f64,
        loss: f64,
    },
    Aggregated {
        rate: BetaParams,
        /// Posterior of the exponential rate, i.e. of 1 / (mean revenue per sale).
        revenue_rate: GammaParams,
        cost_per_visitor: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantPosterior {
    pub name: String,
    pub kind: PosteriorKind,
}

pub fn posterior_one_option(
    prior: &BetaParams,
    obs: &OneOptionObservations,
) -> Result<VariantPosterior> {
    prior.validate()?;
    obs.validate()?;
    let rate = BetaParams {
        a: prior.a + obs.conversions as f64,
        b: prior.b + (obs.visitors - obs.conversions) as f64,
    };
    Ok(VariantPosterior {
        name: obs.name.clone(),
        kind: PosteriorKind::OneOption {
            rate,
            value: obs.value,
            loss: obs.loss,
        },
    })
}

pub fn posterior_multi_options(
    prior: &DirichletParams,
    obs: &MultiOptionObservations,
) -> Result<VariantPosterior> {
    prior.validate()?;
    if prior.len() != obs.options() + 1 {
        return Err(Error::PriorLengthMismatch {
            variant: obs.name.clone(),
            prior_len: prior.len(),
            expected: obs.options() + 1,
        });
    }
    obs.validate()?;
    let none = obs.visitors - obs.total_conversions();
    let counts = obs.conversions.iter().copied().chain(std::iter::once(none));
    let a = prior.a.iter().zip(counts).map(|(a, c)| a + c as f64).collect();
    Ok(VariantPosterior {
        name: obs.name.clone(),
        kind: PosteriorKind::MultiOptions {
            rates: DirichletParams { a },
            values: obs.values.clone(),
            cost_per_visitor: obs.cost_per_visitor,
            loss: obs.loss,
        },
    })
}

pub fn posterior_aggregated(
    prior_rate: &BetaParams,
    prior_revenue: &GammaParams,
    obs: &AggregatedObservations,
) -> Result<VariantPosterior> {
    prior_rate.validate()?;
    prior_revenue.validate()?;
    obs.validate()?;
    let rate = BetaParams {
        a: prior_rate.a + obs.conversions as f64,
        b: prior_rate.b + (obs.visitors - obs.conversions) as f64,
    };
    let revenue_rate = GammaParams {
        alpha: prior_revenue.alpha + obs.conversions as f64,
        beta: prior_revenue.beta + obs.revenue_total,
    };
    Ok(VariantPosterior {
        name: obs.name.clone(),
        kind: PosteriorKind::Aggregated {
            rate,
            revenue_rate,
            cost_per_visitor: obs.cost_per_visitor,
        },
    })
}

fn beta_sampler(p: &BetaParams) -> Result<Beta<f64>> {
    Beta::new(p.a, p.b).map_err(|e| Error::InvalidParameter(format!("beta({}, {}): {e}", p.a, p.b)))
}

fn gamma_rate_sampler(p: &GammaParams) -> Result<Gamma<f64>> {
    Gamma::new(p.alpha, 1.0 / p.beta)
        .map_err(|e| Error::InvalidParameter(format!("gamma({}, {}): {e}", p.alpha, p.beta)))
}

impl VariantPosterior {
    /// Posterior of the overall conversion rate. For multi options this is the
    /// Beta aggregate of the K option components against the no-conversion one.
    pub fn conversion_posterior(&self) -> BetaParams {
        match &self.kind {
            PosteriorKind::OneOption { rate, .. } | PosteriorKind::Aggregated { rate, .. } => *rate,
            PosteriorKind::MultiOptions { rates, .. } => {
                let none = *rates.a.last().expect("validated dirichlet");
                BetaParams {
                    a: rates.total() - none,
                    b: none,
                }
            }
        }
    }

    fn unavailable(&self, metric: Metric, reason: &'static str) -> Error {
        Error::MetricUnavailable {
            variant: self.name.clone(),
            metric: metric.to_string(),
            reason,
        }
    }

    /// Draws `n` samples of `metric`.
    ///
    /// The rate part always consumes `stream.derive(0)` and the aggregated
    /// revenue part `stream.derive(1)`, so the conversion, value and gain
    /// draws for one stream are computed from the same rate draws.
    pub fn draw(&self, metric: Metric, n: usize, stream: &RngStream) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::InvalidParameter("sample count must be at least 1".into()));
        }
        let mut rate_rng = stream.derive(0);
        match &self.kind {
            PosteriorKind::OneOption { rate, value, loss } => {
                let beta = beta_sampler(rate)?;
                let draws = beta.sample_iter(&mut rate_rng).take(n);
                match metric {
                    Metric::Conversion => Ok(draws.collect()),
                    Metric::Value | Metric::Gain => {
                        let v = value.ok_or_else(|| {
                            self.unavailable(metric, "no value recorded for this variant")
                        })?;
                        let l = *loss;
                        Ok(draws.map(|y| y * (v - l) + (1.0 - y) * (-l)).collect())
                    }
                }
            }
            PosteriorKind::MultiOptions {
                rates,
                values,
                cost_per_visitor,
                loss,
            } => {
                let sampler = DirichletSampler::new(rates)?;
                let k = rates.len() - 1;
                let values = match metric {
                    Metric::Conversion => None,
                    _ => Some(values.as_deref().ok_or_else(|| {
                        self.unavailable(metric, "no option values recorded for this variant")
                    })?),
                };
                let l = *loss;
                let mut row = vec![0.0; rates.len()];
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    sampler.sample_into(&mut rate_rng, &mut row);
                    let conversion = 1.0 - row[k];
                    let sample = match values {
                        None => conversion,
                        Some(values) => {
                            let earned: f64 =
                                row[..k].iter().zip(values).map(|(y, v)| y * (v - l)).sum();
                            let value = earned + (1.0 - conversion) * (-l);
                            if metric == Metric::Gain {
                                value - cost_per_visitor
                            } else {
                                value
                            }
                        }
                    };
                    out.push(sample);
                }
                Ok(out)
            }
            PosteriorKind::Aggregated {
                rate,
                revenue_rate,
                cost_per_visitor,
            } => {
                let beta = beta_sampler(rate)?;
                let draws = beta.sample_iter(&mut rate_rng).take(n);
                if metric == Metric::Conversion {
                    return Ok(draws.collect());
                }
                let gamma = gamma_rate_sampler(revenue_rate)?;
                let rates = gamma.sample_iter(stream.derive(1));
                let cost = if metric == Metric::Gain { *cost_per_visitor } else { 0.0 };
                Ok(draws.zip(rates).map(|(y, r)| y / r - cost).collect())
            }
        }
    }
}

/// Posteriors of all variants in an experiment, in input order.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorModel {
    pub variants: Vec<VariantPosterior>,
}

impl PosteriorModel {
    pub fn new(variants: Vec<VariantPosterior>) -> Self {
        Self { variants }
    }

    pub fn names(&self) -> Vec<String> {
        self.variants.iter().map(|v| v.name.clone()).collect()
    }
}

/// `n` Monte-Carlo draws of one metric for every variant.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSamples {
    names: Vec<String>,
    metric: Metric,
    samples: Vec<Vec<f64>>,
    seed: Option<u64>,
}

impl MetricSamples {
    pub fn new(
        names: Vec<String>,
        metric: Metric,
        samples: Vec<Vec<f64>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if names.len() != samples.len() {
            return Err(Error::LengthMismatch {
                left: names.len(),
                right: samples.len(),
            });
        }
        if let Some(first) = samples.first() {
            if first.is_empty() {
                return Err(Error::EmptyInput("metric samples"));
            }
            if let Some(row) = samples.iter().find(|row| row.len() != first.len()) {
                return Err(Error::LengthMismatch {
                    left: first.len(),
                    right: row.len(),
                });
            }
        }
        if metric == Metric::Conversion
            && samples.iter().flatten().any(|y| !(0.0..=1.0).contains(y))
        {
            return Err(Error::InvalidParameter(
                "conversion samples must lie in [0, 1]".into(),
            ));
        }
        Ok(Self {
            names,
            metric,
            samples,
            seed,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn row(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.samples[i].as_slice())
    }

    /// Root seed the draws came from, if they came from a seeded stream.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn variant_count(&self) -> usize {
        self.names.len()
    }

    pub fn n(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }
}

/// Draws `metric` for every variant. Variant `i` uses `root.derive(i)`, and
/// variants are sampled in parallel with results identical to a sequential run.
pub fn draw_metric(
    model: &PosteriorModel,
    metric: Metric,
    n: usize,
    root: &RngStream,
) -> Result<MetricSamples> {
    let samples = model
        .variants
        .par_iter()
        .enumerate()
        .map(|(i, v)| v.draw(metric, n, &root.derive(i as u64)))
        .collect::<Result<Vec<_>>>()?;
    MetricSamples::new(model.names(), metric, samples, Some(root.seed()))
}
