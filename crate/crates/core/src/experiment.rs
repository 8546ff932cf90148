//! Experiment documents: parsing, validation, analysis and plot data.
//!
//! An experiment is a JSON document:
//!
//! ```json
//! {
//!   "model": "one_option",
//!   "metric": "conversion",
//!   "baseline": "Discount 20",
//!   "samples": 200000,
//!   "seed": 7,
//!   "prior": { "beta": { "a": 1, "b": 1 } },
//!   "variants": [
//!     { "name": "Discount 20", "visitors": 15144, "conversions": 139 },
//!     { "name": "Discount 10", "visitors": 15176, "conversions": 147 }
//!   ]
//! }
//! ```
//!
//! Variant records depend on `model`:
//!
//! * `one_option`: `name, visitors, conversions, value?, loss?`
//! * `multi_options`: `name, visitors, conversions[], values[]?, cost_per_visitor?, loss?`
//! * `aggregated`: `name, visitors, conversions, revenue_total, cost_per_visitor?`
//!
//! Any variant may carry its own `prior`, overriding the top-level one field
//! by field. Missing priors default to Beta(1, 1), a symmetric Dirichlet with
//! concentration 1 and Gamma(1, 1).

use std::collections::HashSet;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::decision::{build_report, credible_interval, DecisionReport};
use crate::distributions::{
    density_beta, histogram_density, BetaParams, DensityGrid, DirichletParams, GammaParams,
};
use crate::error::{Error, Result};
use crate::models::{
    draw_metric, posterior_aggregated, posterior_multi_options, posterior_one_option,
    AggregatedObservations, Metric, MetricSamples, MultiOptionObservations,
    OneOptionObservations, PosteriorModel, VariantPosterior, DEFAULT_SAMPLES,
};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    OneOption,
    MultiOptions,
    Aggregated,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::OneOption => "one_option",
            ModelKind::MultiOptions => "multi_options",
            ModelKind::Aggregated => "aggregated",
        }
    }
}

/// Dirichlet prior given either as one concentration shared by every
/// component or as an explicit vector of length K + 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DirichletPrior {
    Symmetric(f64),
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirichlet: Option<DirichletPrior>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GammaParams>,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneOptionVariant {
    pub name: String,
    pub visitors: u64,
    pub conversions: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiOptionsVariant {
    pub name: String,
    pub visitors: u64,
    pub conversions: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub cost_per_visitor: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregatedVariant {
    pub name: String,
    pub visitors: u64,
    pub conversions: u64,
    pub revenue_total: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub cost_per_visitor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
}

/// Variants of one experiment; all share the scenario shape.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Variants {
    OneOption(Vec<OneOptionVariant>),
    MultiOptions(Vec<MultiOptionsVariant>),
    Aggregated(Vec<AggregatedVariant>),
}

impl Variants {
    pub fn model(&self) -> ModelKind {
        match self {
            Variants::OneOption(_) => ModelKind::OneOption,
            Variants::MultiOptions(_) => ModelKind::MultiOptions,
            Variants::Aggregated(_) => ModelKind::Aggregated,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Variants::OneOption(v) => v.len(),
            Variants::MultiOptions(v) => v.len(),
            Variants::Aggregated(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<&str> {
        match self {
            Variants::OneOption(v) => v.iter().map(|v| v.name.as_str()).collect(),
            Variants::MultiOptions(v) => v.iter().map(|v| v.name.as_str()).collect(),
            Variants::Aggregated(v) => v.iter().map(|v| v.name.as_str()).collect(),
        }
    }

    fn priors(&self) -> Vec<Option<&PriorSpec>> {
        match self {
            Variants::OneOption(v) => v.iter().map(|v| v.prior.as_ref()).collect(),
            Variants::MultiOptions(v) => v.iter().map(|v| v.prior.as_ref()).collect(),
            Variants::Aggregated(v) => v.iter().map(|v| v.prior.as_ref()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub model: ModelKind,
    pub metric: Metric,
    pub baseline: String,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prior: Option<PriorSpec>,
    pub variants: Variants,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    model: String,
    #[serde(default)]
    metric: Option<Metric>,
    baseline: String,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    prior: Option<PriorSpec>,
    variants: Vec<serde_json::Value>,
}

fn schema_error<E: std::fmt::Display>(prefix: &str, err: serde_path_to_error::Error<E>) -> Error {
    let inner = err.path().to_string();
    let path = match (prefix.is_empty(), inner.as_str()) {
        (true, p) => p.to_owned(),
        (false, ".") => prefix.to_owned(),
        (false, p) => format!("{prefix}.{p}"),
    };
    Error::Schema {
        path,
        message: err.into_inner().to_string(),
    }
}

fn parse_variants<T: DeserializeOwned>(values: Vec<serde_json::Value>) -> Result<Vec<T>> {
    values
        .into_iter()
        .enumerate()
        .map(|(i, value)| {
            serde_path_to_error::deserialize(value).map_err(|e| schema_error(&format!("variants[{i}]"), e))
        })
        .collect()
}

/// Parses and validates an experiment document, filling in defaults.
pub fn parse_experiment(bytes: &[u8]) -> Result<ExperimentSpec> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    let raw: RawExperiment =
        serde_path_to_error::deserialize(&mut de).map_err(|e| schema_error("", e))?;
    de.end().map_err(|e| Error::Schema {
        path: ".".into(),
        message: e.to_string(),
    })?;
    let variants = match raw.model.as_str() {
        "one_option" => Variants::OneOption(parse_variants(raw.variants)?),
        "multi_options" => Variants::MultiOptions(parse_variants(raw.variants)?),
        "aggregated" => Variants::Aggregated(parse_variants(raw.variants)?),
        other => return Err(Error::UnknownModel(other.to_owned())),
    };
    let spec = ExperimentSpec {
        model: variants.model(),
        metric: raw.metric.unwrap_or(Metric::Conversion),
        baseline: raw.baseline,
        samples: raw.samples.unwrap_or(DEFAULT_SAMPLES),
        seed: raw.seed,
        prior: raw.prior,
        variants,
    };
    spec.validate()?;
    Ok(spec)
}

fn check_amount(path: String, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invariant(path, format!("must be a non-negative number, got {value}")))
    }
}

fn check_prior(path: &str, prior: &PriorSpec, model: ModelKind) -> Result<()> {
    if let Some(beta) = &prior.beta {
        if model == ModelKind::MultiOptions {
            return Err(Error::invariant(format!("{path}.beta"), "not used by the multi_options model"));
        }
        beta.validate()
            .map_err(|e| Error::invariant(format!("{path}.beta"), e.to_string()))?;
    }
    if let Some(dirichlet) = &prior.dirichlet {
        let path = format!("{path}.dirichlet");
        if model != ModelKind::MultiOptions {
            return Err(Error::invariant(path, format!("not used by the {} model", model.as_str())));
        }
        let ok = match dirichlet {
            DirichletPrior::Symmetric(c) => c.is_finite() && *c > 0.0,
            DirichletPrior::Explicit(a) => a.iter().all(|a| a.is_finite() && *a > 0.0),
        };
        if !ok {
            return Err(Error::invariant(path, "concentrations must be positive"));
        }
    }
    if let Some(gamma) = &prior.gamma {
        if model != ModelKind::Aggregated {
            return Err(Error::invariant(
                format!("{path}.gamma"),
                format!("not used by the {} model", model.as_str()),
            ));
        }
        gamma
            .validate()
            .map_err(|e| Error::invariant(format!("{path}.gamma"), e.to_string()))?;
    }
    Ok(())
}

impl ExperimentSpec {
    /// Checks every structural and observation invariant, reporting the
    /// offending field path.
    pub fn validate(&self) -> Result<()> {
        if self.model != self.variants.model() {
            return Err(Error::invariant("model", "does not match the variant records"));
        }
        if self.variants.len() < 2 {
            return Err(Error::invariant(
                "variants",
                format!("at least two variants are required, got {}", self.variants.len()),
            ));
        }
        if self.samples == 0 {
            return Err(Error::invariant("samples", "must be at least 1"));
        }
        let mut seen = HashSet::new();
        for (i, name) in self.variants.names().into_iter().enumerate() {
            if name.trim().is_empty() {
                return Err(Error::invariant(format!("variants[{i}].name"), "must not be empty"));
            }
            if !seen.insert(name) {
                return Err(Error::invariant(
                    format!("variants[{i}].name"),
                    format!("duplicate variant name `{name}`"),
                ));
            }
        }
        if !seen.contains(self.baseline.as_str()) {
            return Err(Error::invariant(
                "baseline",
                format!("`{}` does not name a variant", self.baseline),
            ));
        }
        if let Some(prior) = &self.prior {
            check_prior("prior", prior, self.model)?;
        }
        for (i, prior) in self.variants.priors().into_iter().enumerate() {
            if let Some(prior) = prior {
                check_prior(&format!("variants[{i}].prior"), prior, self.model)?;
            }
        }
        match &self.variants {
            Variants::OneOption(vs) => {
                for (i, v) in vs.iter().enumerate() {
                    let p = format!("variants[{i}]");
                    if v.conversions > v.visitors {
                        return Err(Error::invariant(
                            format!("{p}.conversions"),
                            format!("{} conversions exceed {} visitors", v.conversions, v.visitors),
                        ));
                    }
                    if let Some(value) = v.value {
                        check_amount(format!("{p}.value"), value)?;
                    } else if self.metric != Metric::Conversion {
                        return Err(Error::invariant(
                            format!("{p}.value"),
                            format!("required for metric `{}`", self.metric),
                        ));
                    }
                    check_amount(format!("{p}.loss"), v.loss)?;
                }
            }
            Variants::MultiOptions(vs) => {
                for (i, v) in vs.iter().enumerate() {
                    let p = format!("variants[{i}]");
                    if v.conversions.is_empty() {
                        return Err(Error::invariant(format!("{p}.conversions"), "at least one option is required"));
                    }
                    let total: u64 = v.conversions.iter().sum();
                    if total > v.visitors {
                        return Err(Error::invariant(
                            format!("{p}.conversions"),
                            format!("{total} conversions exceed {} visitors", v.visitors),
                        ));
                    }
                    match &v.values {
                        Some(values) => {
                            if values.len() != v.conversions.len() {
                                return Err(Error::invariant(
                                    format!("{p}.values"),
                                    format!(
                                        "has {} entries but there are {} options",
                                        values.len(),
                                        v.conversions.len()
                                    ),
                                ));
                            }
                            for (l, &value) in values.iter().enumerate() {
                                check_amount(format!("{p}.values[{l}]"), value)?;
                            }
                        }
                        None if self.metric != Metric::Conversion => {
                            return Err(Error::invariant(
                                format!("{p}.values"),
                                format!("required for metric `{}`", self.metric),
                            ));
                        }
                        None => {}
                    }
                    check_amount(format!("{p}.cost_per_visitor"), v.cost_per_visitor)?;
                    check_amount(format!("{p}.loss"), v.loss)?;
                    if let Some(DirichletPrior::Explicit(a)) = self.dirichlet_prior_for(i) {
                        if a.len() != v.conversions.len() + 1 {
                            let path = if v.prior.as_ref().and_then(|p| p.dirichlet.as_ref()).is_some() {
                                format!("{p}.prior.dirichlet")
                            } else {
                                "prior.dirichlet".to_owned()
                            };
                            return Err(Error::invariant(
                                path,
                                format!(
                                    "has {} components, variant `{}` needs {}",
                                    a.len(),
                                    v.name,
                                    v.conversions.len() + 1
                                ),
                            ));
                        }
                    }
                }
            }
            Variants::Aggregated(vs) => {
                for (i, v) in vs.iter().enumerate() {
                    let p = format!("variants[{i}]");
                    if v.conversions > v.visitors {
                        return Err(Error::invariant(
                            format!("{p}.conversions"),
                            format!("{} conversions exceed {} visitors", v.conversions, v.visitors),
                        ));
                    }
                    check_amount(format!("{p}.revenue_total"), v.revenue_total)?;
                    if v.conversions == 0 && v.revenue_total != 0.0 {
                        return Err(Error::invariant(
                            format!("{p}.revenue_total"),
                            "must be 0 when there are no conversions",
                        ));
                    }
                    check_amount(format!("{p}.cost_per_visitor"), v.cost_per_visitor)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("experiment serializes")
    }

    fn dirichlet_prior_for(&self, i: usize) -> Option<&DirichletPrior> {
        let own = self.variants.priors()[i].and_then(|p| p.dirichlet.as_ref());
        own.or_else(|| self.prior.as_ref().and_then(|p| p.dirichlet.as_ref()))
    }

    fn beta_prior_for(&self, i: usize) -> BetaParams {
        let own = self.variants.priors()[i].and_then(|p| p.beta);
        own.or_else(|| self.prior.as_ref().and_then(|p| p.beta))
            .unwrap_or_else(BetaParams::uniform)
    }

    fn gamma_prior_for(&self, i: usize) -> GammaParams {
        let own = self.variants.priors()[i].and_then(|p| p.gamma);
        own.or_else(|| self.prior.as_ref().and_then(|p| p.gamma))
            .unwrap_or(GammaParams { alpha: 1.0, beta: 1.0 })
    }

    /// Conjugate posteriors of every variant, in document order.
    pub fn posterior_model(&self) -> Result<PosteriorModel> {
        let variants: Vec<VariantPosterior> = match &self.variants {
            Variants::OneOption(vs) => vs
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let obs = OneOptionObservations {
                        name: v.name.clone(),
                        visitors: v.visitors,
                        conversions: v.conversions,
                        value: v.value,
                        loss: v.loss,
                    };
                    posterior_one_option(&self.beta_prior_for(i), &obs)
                })
                .collect::<Result<_>>()?,
            Variants::MultiOptions(vs) => vs
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let k = v.conversions.len() + 1;
                    let prior = match self.dirichlet_prior_for(i) {
                        None => DirichletParams::symmetric(k, 1.0)?,
                        Some(DirichletPrior::Symmetric(c)) => DirichletParams::symmetric(k, *c)?,
                        Some(DirichletPrior::Explicit(a)) => DirichletParams::new(a.clone())?,
                    };
                    let obs = MultiOptionObservations {
                        name: v.name.clone(),
                        visitors: v.visitors,
                        conversions: v.conversions.clone(),
                        values: v.values.clone(),
                        cost_per_visitor: v.cost_per_visitor,
                        loss: v.loss,
                    };
                    posterior_multi_options(&prior, &obs)
                })
                .collect::<Result<_>>()?,
            Variants::Aggregated(vs) => vs
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let obs = AggregatedObservations {
                        name: v.name.clone(),
                        visitors: v.visitors,
                        conversions: v.conversions,
                        revenue_total: v.revenue_total,
                        cost_per_visitor: v.cost_per_visitor,
                    };
                    posterior_aggregated(&self.beta_prior_for(i), &self.gamma_prior_for(i), &obs)
                })
                .collect::<Result<_>>()?,
        };
        Ok(PosteriorModel::new(variants))
    }

    /// Collapses a multi_options experiment to totals: summed conversions and
    /// the value-weighted revenue. Priors fall back to the aggregated defaults.
    pub fn aggregate(&self) -> Result<ExperimentSpec> {
        let Variants::MultiOptions(vs) = &self.variants else {
            return Err(Error::invariant("model", "only multi_options experiments can be aggregated"));
        };
        let variants = vs
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let values = v.values.as_ref().ok_or_else(|| {
                    Error::invariant(format!("variants[{i}].values"), "required to aggregate revenue")
                })?;
                let revenue_total = v.conversions.iter().zip(values).map(|(&c, &v)| c as f64 * v).sum();
                Ok(AggregatedVariant {
                    name: v.name.clone(),
                    visitors: v.visitors,
                    conversions: v.conversions.iter().sum(),
                    revenue_total,
                    cost_per_visitor: v.cost_per_visitor,
                    prior: None,
                })
            })
            .collect::<Result<_>>()?;
        let spec = ExperimentSpec {
            model: ModelKind::Aggregated,
            prior: None,
            variants: Variants::Aggregated(variants),
            ..self.clone()
        };
        spec.validate()?;
        Ok(spec)
    }

    fn root_stream(&self) -> RngStream {
        self.seed.map_or_else(RngStream::from_entropy, RngStream::new)
    }

    /// Draws `self.metric` for every variant.
    pub fn draw(&self) -> Result<MetricSamples> {
        draw_metric(&self.posterior_model()?, self.metric, self.samples, &self.root_stream())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    pub ci95: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub report: DecisionReport,
    pub summaries: Vec<VariantSummary>,
}

/// Builds the posteriors, draws the metric and assembles the decision report.
/// Without a seed in the experiment, one is drawn from entropy and recorded in the report.
pub fn run_analysis(spec: &ExperimentSpec) -> Result<Analysis> {
    spec.validate()?;
    let samples = spec.draw()?;
    let report = build_report(&samples, &spec.baseline)?;
    let summaries = samples
        .names()
        .iter()
        .zip(samples.rows())
        .map(|(name, row)| {
            let n = row.len() as f64;
            let mean = row.iter().sum::<f64>() / n;
            let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
            let (lo, hi) = credible_interval(row, 0.95)?;
            Ok(VariantSummary {
                name: name.clone(),
                mean,
                sd: var.sqrt(),
                ci95: [lo, hi],
            })
        })
        .collect::<Result<_>>()?;
    Ok(Analysis { report, summaries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensitySource {
    /// Closed-form Beta pdf.
    Analytic,
    /// Normalized histogram of Monte-Carlo draws.
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantDensity {
    pub name: String,
    pub source: DensitySource,
    pub grid: DensityGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub variants: Vec<VariantDensity>,
}

impl DensityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("density report serializes")
    }

    /// Long format: one `variant,x,density` row per grid point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,x,density\n");
        for v in &self.variants {
            let name = if v.name.contains([',', '"', '\n']) {
                format!("\"{}\"", v.name.replace('"', "\"\""))
            } else {
                v.name.clone()
            };
            for (x, d) in v.grid.x().iter().zip(v.grid.density()) {
                out.push_str(&format!("{name},{x},{d}\n"));
            }
        }
        out
    }
}

/// Standard deviations either side of the mean covered by analytic grids.
const ANALYTIC_SPAN_SDS: f64 = 10.0;

/// Posterior densities of `spec.metric` for the selected variants (all when
/// `only` is empty). Conversion rates use the analytic Beta pdf on a shared
/// range; value and gain use histograms over the pooled range of the draws.
pub fn emit_density(spec: &ExperimentSpec, grid_size: usize, only: &[String]) -> Result<DensityReport> {
    spec.validate()?;
    let names = spec.variants.names();
    if let Some(missing) = only.iter().find(|n| !names.contains(&n.as_str())) {
        return Err(Error::invariant("variant", format!("`{missing}` does not name a variant")));
    }
    let selected = |name: &str| only.is_empty() || only.iter().any(|o| o == name);
    let model = spec.posterior_model()?;

    if spec.metric == Metric::Conversion {
        let posteriors: Vec<(&str, BetaParams)> = model
            .variants
            .iter()
            .filter(|v| selected(&v.name))
            .map(|v| (v.name.as_str(), v.conversion_posterior()))
            .collect();
        let (lo, hi) = posteriors.iter().fold((1.0f64, 0.0f64), |(lo, hi), (_, p)| {
            let spread = ANALYTIC_SPAN_SDS * p.variance().sqrt();
            (lo.min(p.mean() - spread), hi.max(p.mean() + spread))
        });
        let (lo, hi) = (lo.max(0.0), hi.min(1.0));
        let variants = posteriors
            .into_iter()
            .map(|(name, p)| {
                Ok(VariantDensity {
                    name: name.to_owned(),
                    source: DensitySource::Analytic,
                    grid: density_beta(&p, grid_size, lo, hi)?,
                })
            })
            .collect::<Result<_>>()?;
        return Ok(DensityReport {
            metric: spec.metric,
            seed: None,
            variants,
        });
    }

    let samples = spec.draw()?;
    let rows: Vec<(&String, &Vec<f64>)> = samples
        .names()
        .iter()
        .zip(samples.rows())
        .filter(|(name, _)| selected(name))
        .collect();
    let (lo, hi) = rows
        .iter()
        .flat_map(|(_, row)| row.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let variants = rows
        .into_iter()
        .map(|(name, row)| {
            Ok(VariantDensity {
                name: name.clone(),
                source: DensitySource::Histogram,
                grid: histogram_density(row, grid_size, lo, hi)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(DensityReport {
        metric: spec.metric,
        seed: samples.seed(),
        variants,
    })
}
