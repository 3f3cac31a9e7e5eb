//! Interleaved test-then-train stream runs with drift detection and
//! adaptation.

mod detector;
mod run;

pub use detector::{Detector, DetectorSpec, Flag};
pub use run::{
    decision_agreement, run_stream, run_stream_with, windowed_itte, Action, Adaptation, Policy,
    RunConfig, StepRecord, StreamLog, StreamSource, DEFAULT_INIT, DEFAULT_REFIT_EVERY,
};
