//! Beta, Dirichlet and Gamma parameters, seeded samplers and density grids.
//!
//! Gamma is parametrized by shape and *rate*: `Gamma(alpha, beta)` has mean
//! `alpha / beta`. That is the parametrization under which the exponential
//! likelihood with a Gamma prior on its rate updates to
//! `Gamma(alpha + count, beta + sum)`.

use rand_distr::{Beta, Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Default number of points for analytic density grids and histogram bins.
pub const DEFAULT_GRID_SIZE: usize = 512;

fn check_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaParams {
    pub a: f64,
    pub b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let params = Self { a, b };
        params.validate()?;
        Ok(params)
    }

    /// Beta(1, 1).
    pub fn uniform() -> Self {
        Self { a: 1.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("beta shape a", self.a)?;
        check_positive("beta shape b", self.b)
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn variance(&self) -> f64 {
        let s = self.a + self.b;
        self.a * self.b / (s * s * (s + 1.0))
    }

    /// Interior mode, defined when both shapes exceed one.
    pub fn mode(&self) -> Option<f64> {
        (self.a > 1.0 && self.b > 1.0).then(|| (self.a - 1.0) / (self.a + self.b - 2.0))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        // Boundary points: x^(a-1) is 1 for a == 1, 0 for a > 1, unbounded for a < 1.
        let edge = |shape: f64| {
            if shape < 1.0 {
                Some(f64::INFINITY)
            } else if shape > 1.0 {
                Some(0.0)
            } else {
                None
            }
        };
        if x == 0.0 {
            if let Some(v) = edge(self.a) {
                return v;
            }
        }
        if x == 1.0 {
            if let Some(v) = edge(self.b) {
                return v;
            }
        }
        let mut ln = -ln_beta(self.a, self.b);
        if self.a != 1.0 {
            ln += (self.a - 1.0) * x.ln();
        }
        if self.b != 1.0 {
            ln += (self.b - 1.0) * (1.0 - x).ln();
        }
        ln.exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams {
    pub a: Vec<f64>,
}

impl DirichletParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        let params = Self { a };
        params.validate()?;
        Ok(params)
    }

    /// Symmetric Dirichlet with `k` components all equal to `concentration`.
    pub fn symmetric(k: usize, concentration: f64) -> Result<Self> {
        Self::new(vec![concentration; k])
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "dirichlet needs at least 2 components, got {}",
                self.a.len()
            )));
        }
        for (l, &a) in self.a.iter().enumerate() {
            check_positive(&format!("dirichlet component {l}"), a)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let total = self.total();
        self.a.iter().map(|a| a / total).collect()
    }

    /// Marginal of component `l`, which is Beta(a_l, total - a_l).
    pub fn marginal(&self, l: usize) -> BetaParams {
        BetaParams {
            a: self.a[l],
            b: self.total() - self.a[l],
        }
    }
}

/// Shape `alpha`, rate `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl GammaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let params = Self { alpha, beta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("gamma shape alpha", self.alpha)?;
        check_positive("gamma rate beta", self.beta)
    }

    pub fn mean(&self) -> f64 {
        self.alpha / self.beta
    }

    /// Mean of the reciprocal (an inverse-Gamma mean), finite for alpha > 1.
    pub fn reciprocal_mean(&self) -> Option<f64> {
        (self.alpha > 1.0).then(|| self.beta / (self.alpha - 1.0))
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return match self.alpha.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => self.beta,
                _ => 0.0,
            };
        }
        (self.alpha * self.beta.ln() + (self.alpha - 1.0) * x.ln()
            - self.beta * x
            - ln_gamma(self.alpha))
        .exp()
    }

    fn sampler(&self) -> Result<Gamma<f64>> {
        self.validate()?;
        Gamma::new(self.alpha, 1.0 / self.beta)
            .map_err(|e| Error::InvalidParameter(format!("gamma({}, {}): {e}", self.alpha, self.beta)))
    }
}

pub fn sample_beta(params: &BetaParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_count(n)?;
    params.validate()?;
    let dist = Beta::new(params.a, params.b)
        .map_err(|e| Error::InvalidParameter(format!("beta({}, {}): {e}", params.a, params.b)))?;
    Ok(dist.sample_iter(rng).take(n).collect())
}

pub fn sample_gamma(params: &GammaParams, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    check_count(n)?;
    let dist = params.sampler()?;
    Ok(dist.sample_iter(rng).take(n).collect())
}

/// Draws from a Dirichlet by normalizing independent Gamma(a_l, 1) variates.
#[derive(Debug, Clone)]
pub(crate) struct DirichletSampler {
    gammas: Vec<Gamma<f64>>,
}

impl DirichletSampler {
    pub(crate) fn new(params: &DirichletParams) -> Result<Self> {
        params.validate()?;
        let gammas = params
            .a
            .iter()
            .map(|&a| {
                Gamma::new(a, 1.0)
                    .map_err(|e| Error::InvalidParameter(format!("dirichlet component {a}: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self { gammas })
    }

    /// Writes one simplex point into `out`, which must have one slot per component.
    pub(crate) fn sample_into(&self, rng: &mut RngStream, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.gammas.len());
        loop {
            let mut total = 0.0;
            for (slot, g) in out.iter_mut().zip(&self.gammas) {
                *slot = g.sample(rng);
                total += *slot;
            }
            // All components underflowing is only possible for tiny shapes.
            if total > 0.0 {
                out.iter_mut().for_each(|x| *x /= total);
                return;
            }
        }
    }
}

pub fn sample_dirichlet(
    params: &DirichletParams,
    n: usize,
    rng: &mut RngStream,
) -> Result<Vec<Vec<f64>>> {
    check_count(n)?;
    let sampler = DirichletSampler::new(params)?;
    Ok((0..n)
        .map(|_| {
            let mut row = vec![0.0; params.len()];
            sampler.sample_into(rng, &mut row);
            row
        })
        .collect())
}

/// A density evaluated on an ordered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    x: Vec<f64>,
    density: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DensityPoint {
    x: f64,
    density: f64,
}

impl DensityGrid {
    pub fn new(x: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        if x.len() != density.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: density.len(),
            });
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("grid x must be strictly increasing".into()));
        }
        if density.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::InvalidParameter("density must be non-negative".into()));
        }
        Ok(Self { x, density })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Grid point with the largest density.
    pub fn argmax(&self) -> Option<f64> {
        self.density
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| self.x[i])
    }

    /// Trapezoidal integral over the grid.
    pub fn trapezoid(&self) -> f64 {
        self.x
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, d)| 0.5 * (x[1] - x[0]) * (d[0] + d[1]))
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,density\n");
        for (x, d) in self.x.iter().zip(&self.density) {
            out.push_str(&format!("{x},{d}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("density grid serializes")
    }
}

impl Serialize for DensityGrid {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = serializer.serialize_seq(Some(self.x.len()))?;
        for (&x, &density) in self.x.iter().zip(&self.density) {
            seq.serialize_element(&DensityPoint { x, density })?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for DensityGrid {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let points = Vec::<DensityPoint>::deserialize(deserializer)?;
        let (x, density) = points.into_iter().map(|p| (p.x, p.density)).unzip();
        DensityGrid::new(x, density).map_err(serde::de::Error::custom)
    }
}

/// Analytic Beta pdf on `grid_size` evenly spaced points spanning `[lo, hi]`.
pub fn density_beta(params: &BetaParams, grid_size: usize, lo: f64, hi: f64) -> Result<DensityGrid> {
    params.validate()?;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "need 0 <= lo < hi <= 1".into(),
        });
    }
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid size must be at least 2".into()));
    }
    let step = (hi - lo) / (grid_size - 1) as f64;
    let x: Vec<f64> = (0..grid_size)
        .map(|i| if i + 1 == grid_size { hi } else { lo + step * i as f64 })
        .collect();
    let density = x.iter().map(|&x| params.pdf(x)).collect();
    Ok(DensityGrid { x, density })
}

/// Normalized histogram over `[min, max]` of the samples, with bin centers as x.
///
/// The rectangle sum `density * bin_width` over all bins is one.
pub fn empirical_density(samples: &[f64], bins: usize) -> Result<DensityGrid> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("empirical density needs samples"));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter("histogram needs at least 2 bins".into()));
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidParameter("samples must be finite".into()));
    }
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    histogram_density(samples, bins, lo, hi)
}

/// Normalized histogram with `bins` equal bins over `[lo, hi]`. Samples outside
/// the range are clamped into the edge bins. A degenerate range `lo == hi` is
/// widened symmetrically.
pub fn histogram_density(samples: &[f64], bins: usize, lo: f64, hi: f64) -> Result<DensityGrid> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("histogram needs samples"));
    }
    if bins < 2 {
        return Err(Error::InvalidParameter("histogram needs at least 2 bins".into()));
    }
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidRange {
            lo,
            hi,
            reason: "need finite lo <= hi".into(),
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    if lo == hi {
        let half = 0.5 * lo.abs().max(1.0);
        lo -= half;
        hi += half;
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &s in samples {
        let idx = (((s - lo) / width).max(0.0) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let norm = samples.len() as f64 * width;
    let x = (0..bins).map(|i| lo + width * (i as f64 + 0.5)).collect();
    let density = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok(DensityGrid { x, density })
}
