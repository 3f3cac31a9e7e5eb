//! Batch and incremental binary classifiers behind one contract.

mod ensemble;
mod erm;
mod gnb;
mod knn;
mod linear;
mod prep;
mod spec;
mod tree;

use std::fmt;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::types::{Instance, Label, Schema};

pub use ensemble::{AdaBoost, Forest};
pub use erm::{ConstantLearner, ErmFinite};
pub use gnb::GaussianNb;
pub use knn::Knn;
pub use linear::{LinearSvm, Perceptron};
pub use spec::{LearnerKind, LearnerSpec};
pub use tree::{DecisionTree, TreeParams};

/// Train/update/predict contract shared by every learner.
///
/// `fit` replaces any previous state. `update` is only supported by the
/// incremental kinds. Unfitted learners refuse to predict.
pub trait Classifier: Send + Sync + fmt::Debug {
    fn spec(&self) -> &LearnerSpec;

    fn fit(&mut self, sample: &Sample) -> Result<()>;

    fn update(&mut self, _x: &Instance, _y: Label) -> Result<()> {
        Err(Error::Unsupported(format!("{} does not learn incrementally", self.spec().kind)))
    }

    /// Class-1 score in `[0, 1]`; equals the label for kinds without one.
    fn score(&self, x: &Instance) -> Result<f64>;

    fn predict(&self, x: &Instance) -> Result<Label> {
        Ok(Label::from_bool(self.score(x)? > 0.5))
    }

    /// Back to the unfitted initial state.
    fn reset(&mut self);

    fn is_fitted(&self) -> bool;

    fn clone_box(&self) -> Box<dyn Classifier>;

    fn is_incremental(&self) -> bool {
        self.spec().kind.is_incremental()
    }
}

impl Clone for Box<dyn Classifier> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

/// Instantiates an unfitted learner, validating its hyperparameters.
pub fn build(spec: &LearnerSpec) -> Result<Box<dyn Classifier>> {
    Ok(match spec.kind {
        LearnerKind::ErmFinite => Box::new(ErmFinite::from_spec(spec)?),
        LearnerKind::Constant => Box::new(ConstantLearner::from_spec(spec)?),
        LearnerKind::Dt => Box::new(DecisionTree::from_spec(spec)?),
        LearnerKind::Rf | LearnerKind::Bagging => Box::new(Forest::from_spec(spec)?),
        LearnerKind::AdaBoost => Box::new(AdaBoost::from_spec(spec)?),
        LearnerKind::Knn => Box::new(Knn::from_spec(spec)?),
        LearnerKind::Gnb => Box::new(GaussianNb::from_spec(spec)?),
        LearnerKind::Perceptron => Box::new(Perceptron::from_spec(spec)?),
        LearnerKind::LinearSvm => Box::new(LinearSvm::from_spec(spec)?),
    })
}

/// Builds and fits in one step.
pub fn fit(spec: &LearnerSpec, sample: &Sample) -> Result<Box<dyn Classifier>> {
    let mut model = build(spec)?;
    model.fit(sample)?;
    Ok(model)
}

/// Fraction of correctly labelled points.
pub fn accuracy(model: &dyn Classifier, sample: &Sample) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut hits = 0usize;
    for (x, y) in sample.iter() {
        hits += (model.predict(x)? == *y) as usize;
    }
    Ok(hits as f64 / sample.len() as f64)
}

fn check_fit_input(sample: &Sample) -> Result<Schema> {
    sample.schema().ok_or(Error::EmptySample)
}

fn check_query(schema: Option<Schema>, x: &Instance) -> Result<()> {
    schema.ok_or(Error::NotFitted)?.check(x)
}
