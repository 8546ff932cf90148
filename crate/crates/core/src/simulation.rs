//! Sequential Bayesian updating on a simulated Bernoulli conversion stream.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{density_beta, BetaParams, DensityGrid, DEFAULT_GRID_SIZE};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub seen: u64,
    pub successes: u64,
    pub posterior: BetaParams,
    pub density: DensityGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdatingTrace {
    pub prior: BetaParams,
    pub true_rate: f64,
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checkpoints: Vec<Checkpoint>,
}

impl UpdatingTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// One line per checkpoint: seen, successes and the posterior summary.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("seen,successes,a,b,mean\n");
        for c in &self.checkpoints {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.seen,
                c.successes,
                c.posterior.a,
                c.posterior.b,
                c.posterior.mean()
            ));
        }
        out
    }
}

/// Generates `n` Bernoulli(`true_rate`) outcomes once and reports the Beta
/// posterior after each prefix length in `checkpoints`.
pub fn simulate_updating(
    prior: &BetaParams,
    true_rate: f64,
    n: u64,
    checkpoints: &[u64],
    rng: &mut RngStream,
) -> Result<UpdatingTrace> {
    simulate_updating_with_grid(prior, true_rate, n, checkpoints, DEFAULT_GRID_SIZE, rng)
}

pub fn simulate_updating_with_grid(
    prior: &BetaParams,
    true_rate: f64,
    n: u64,
    checkpoints: &[u64],
    grid_size: usize,
    rng: &mut RngStream,
) -> Result<UpdatingTrace> {
    prior.validate()?;
    if !(0.0..=1.0).contains(&true_rate) {
        return Err(Error::InvalidParameter(format!(
            "true rate must lie in [0, 1], got {true_rate}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if checkpoints.is_empty() {
        return Err(Error::EmptyInput("checkpoints"));
    }
    if let Some(&bad) = checkpoints.iter().find(|&&c| c == 0 || c > n) {
        return Err(Error::CheckpointOutOfRange { checkpoint: bad, n });
    }
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly increasing".into(),
        ));
    }

    let seed = Some(rng.seed());
    let mut trace = Vec::with_capacity(checkpoints.len());
    let mut successes = 0u64;
    let mut seen = 0u64;
    for &stop in checkpoints {
        while seen < stop {
            successes += u64::from(rng.random_bool(true_rate));
            seen += 1;
        }
        let posterior = BetaParams {
            a: prior.a + successes as f64,
            b: prior.b + (seen - successes) as f64,
        };
        let density = density_beta(&posterior, grid_size, 0.0, 1.0)?;
        trace.push(Checkpoint {
            seen,
            successes,
            posterior,
            density,
        });
    }
    Ok(UpdatingTrace {
        prior: *prior,
        true_rate,
        n,
        seed,
        checkpoints: trace,
    })
}
