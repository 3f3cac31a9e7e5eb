//! Finite-class ERM over a threshold grid, and the constant learner.

use crate::distribution::{empirical_loss, Sample};
use crate::error::{Error, Result};
use crate::oracle::hypothesis::{FiniteHypothesisClass, Hypothesis};
use crate::types::{Instance, Label, LossFunction, Predictor, Schema};

use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

/// Returns the lowest-index hypothesis of minimal empirical loss.
#[derive(Debug, Clone)]
pub struct ErmFinite {
    spec: LearnerSpec,
    class: FiniteHypothesisClass,
    loss: LossFunction,
    chosen: Option<usize>,
    schema: Option<Schema>,
}

impl ErmFinite {
    /// From `lo`, `hi`, `steps`, `feature`: thresholds `1[x_f > θ]` on an
    /// even grid (defaults −1, 1, 21, 0).
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let lo: f64 = spec.get("lo", -1.0)?;
        let hi: f64 = spec.get("hi", 1.0)?;
        let steps = spec.get_usize("steps", 21, 1)?;
        let feature = spec.get_usize("feature", 0, 0)?;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config("erm-finite: need finite lo <= hi".into()));
        }
        let thetas: Vec<f64> = if steps == 1 {
            vec![lo]
        } else {
            (0..steps).map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64).collect()
        };
        Ok(Self::new(
            spec.clone(),
            FiniteHypothesisClass::thresholds(feature, &thetas)?,
            LossFunction::ZeroOne,
        ))
    }

    pub fn new(spec: LearnerSpec, class: FiniteHypothesisClass, loss: LossFunction) -> Self {
        Self {
            spec,
            class,
            loss,
            chosen: None,
            schema: None,
        }
    }

    pub fn with_class(class: FiniteHypothesisClass, loss: LossFunction) -> Self {
        Self::new(LearnerSpec::new(LearnerKind::ErmFinite), class, loss)
    }

    pub fn chosen(&self) -> Option<(usize, &Hypothesis)> {
        self.chosen.map(|i| (i, self.class.get(i)))
    }
}

impl Classifier for ErmFinite {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        self.class.check_schema(schema)?;
        let mut best = (f64::INFINITY, 0);
        for (i, h) in self.class.hypotheses().iter().enumerate() {
            let l = empirical_loss(h, sample, self.loss)?;
            if l < best.0 {
                best = (l, i);
            }
        }
        self.chosen = Some(best.1);
        self.schema = Some(schema);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        let (_, h) = self.chosen().ok_or(Error::NotFitted)?;
        Ok(h.output(x).clamp(0.0, 1.0))
    }

    fn reset(&mut self) {
        self.chosen = None;
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.chosen.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}

/// Ignores the data: always the fixed model `h₀ ≡ label`.
#[derive(Debug, Clone)]
pub struct ConstantLearner {
    spec: LearnerSpec,
    label: Label,
    schema: Option<Schema>,
}

impl ConstantLearner {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let v: u8 = spec.get("label", 0)?;
        Ok(Self {
            spec: spec.clone(),
            label: Label::new(v).map_err(|_| Error::Config(format!("constant: label {v} not in {{0,1}}")))?,
            schema: None,
        })
    }
}

impl Classifier for ConstantLearner {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        self.schema = Some(check_fit_input(sample)?);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        Ok(self.label.as_f64())
    }

    fn reset(&mut self) {
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.schema.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
