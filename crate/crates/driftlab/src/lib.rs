//! Experiment harness: the drift-type grid, composed windows, the usage
//! metric, oracle verification suites and a stream demo, with Welch tests
//! and CSV/SVG output.

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod results;
pub mod stats;
pub mod theory;

pub use config::{DatasetSpec, Experiment, ExperimentConfig};
pub use error::{Error, Result};
pub use results::ResultTable;

/// Scatter panels drawn for each experiment.
pub fn default_panels(experiment: Experiment) -> Vec<(String, String)> {
    let pairs: &[(&str, &str)] = match experiment {
        Experiment::DriftTypes => &[("none", "real"), ("none", "virtual"), ("virtual", "both")],
        Experiment::Composed => &[("none", "composed-real"), ("none", "composed-virtual")],
        Experiment::UsageMetric => &[("other-virtual", "composed-virtual"), ("none", "composed-virtual")],
        Experiment::StreamDemo => &[("passive", "active"), ("passive", "hybrid")],
        Experiment::VerifyTheory => &[],
    };
    pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}
