//! Drift-notion oracles on finite drift processes, batch and incremental
//! learners, stream generators with controlled drift injection, and an
//! interleaved test-then-train stream engine.

pub mod distribution;
pub mod engine;
pub mod error;
pub mod learners;
pub mod oracle;
pub mod process;
pub mod rng;
pub mod streams;
pub mod types;

pub use distribution::{draw_sample, empirical_loss, expected_loss, Atom, FiniteDistribution, Provenance, Sample};
pub use error::{Error, Result};
pub use process::{has_distribution_drift, mean_distribution, DriftProcess, TimePoint, TimeWindow};
pub use types::{Instance, Label, LossFunction, Predictor, Schema};
