//! Bayesian A/B test analysis.
//!
//! Three conjugate experiment models (one option, multi options, aggregated
//! revenue), Monte-Carlo draws of conversion rate, value and gain per visitor,
//! and the decision metrics built on them: probability to be best,
//! probability to beat the baseline, expected uplift with a 95% credible
//! interval, and expected loss.
//!
//! ```
//! use bayes_ab::experiment::{parse_experiment, run_analysis};
//!
//! let doc = br#"{
//!     "model": "one_option", "baseline": "A", "samples": 20000, "seed": 1,
//!     "variants": [
//!         {"name": "A", "visitors": 1000, "conversions": 50},
//!         {"name": "B", "visitors": 1000, "conversions": 65}
//!     ]
//! }"#;
//! let spec = parse_experiment(doc).unwrap();
//! let analysis = run_analysis(&spec).unwrap();
//! let b = analysis.report.row("B").unwrap();
//! assert!(b.prob_beat_baseline.unwrap() > 0.8);
//! ```

pub mod cli;
pub mod decision;
pub mod distributions;
pub mod error;
pub mod experiment;
pub mod models;
pub mod rng;
pub mod simulation;

pub use error::{Error, Result};
pub use rng::RngStream;
