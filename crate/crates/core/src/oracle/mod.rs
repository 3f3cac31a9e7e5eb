//! Exact decision procedures for drift notions over finite classes.

pub mod adrift;
pub mod implications;
pub mod fixtures;
pub mod hypothesis;
pub mod notions;
pub mod random;
pub mod tabular;

pub use adrift::{check_a_drift_mc, ADriftEstimate, ClassLearner, Erm, McParams, McVerdict};
pub use implications::{verify_implications, Arrow, ArrowCheck, ImplicationCheck, ImplicationParams, Outcome};
pub use fixtures::{make_fixture, Fixture, FixtureId};
pub use hypothesis::{Direction, FiniteHypothesisClass, Hypothesis};
pub use notions::{
    analyze, argmin_set, check_ell, check_strong_h, check_weak_h, discrepancy, has_real_drift,
    loss_uniqueness_holds, optimal_loss_relation, DriftReport, LossRelation, DEFAULT_TOLERANCE,
};
pub use tabular::{tabular_strong_h, tabular_universal_class};
