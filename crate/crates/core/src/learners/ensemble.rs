//! Bagged trees, random forests and SAMME AdaBoost over stumps.

use rand::Rng;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::rng;
use crate::types::{Instance, Schema};

use super::tree::{Cart, TreeParams};
use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

const DEFAULT_ENSEMBLE: usize = 10;

/// Bagging (all features per split) or random forest (`⌈√d⌉` features per
/// split); score is the share of trees voting 1.
#[derive(Debug, Clone)]
pub struct Forest {
    spec: LearnerSpec,
    trees: usize,
    params: TreeParams,
    max_features: MaxFeatures,
    bootstrap: bool,
    fitted: Vec<Cart>,
    schema: Option<Schema>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MaxFeatures {
    All,
    Sqrt,
    Fixed(usize),
}

impl Forest {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        let default_mf = match spec.kind {
            LearnerKind::Rf => MaxFeatures::Sqrt,
            LearnerKind::Bagging => MaxFeatures::All,
            other => return Err(Error::Config(format!("{other} is not a tree ensemble"))),
        };
        let max_features = match spec.params.get("max_features").map(String::as_str) {
            None => default_mf,
            Some("all") => MaxFeatures::All,
            Some("sqrt") => MaxFeatures::Sqrt,
            Some(_) => MaxFeatures::Fixed(spec.get_usize("max_features", 1, 1)?),
        };
        Ok(Self {
            spec: spec.clone(),
            trees: spec.get_usize("trees", DEFAULT_ENSEMBLE, 1)?,
            params: TreeParams::from_spec(spec, 10)?,
            max_features,
            bootstrap: spec.get("bootstrap", true)?,
            fitted: Vec::new(),
            schema: None,
        })
    }
}

impl Classifier for Forest {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        let d = schema.width();
        let mf = match self.max_features {
            MaxFeatures::All => None,
            MaxFeatures::Sqrt => Some(((d as f64).sqrt().ceil() as usize).clamp(1, d.max(1))),
            MaxFeatures::Fixed(m) => Some(m.min(d.max(1))),
        };
        let params = TreeParams {
            max_features: mf,
            ..self.params
        };
        let n = sample.len();
        let weights = vec![1.0; n];
        self.fitted = (0..self.trees)
            .map(|t| {
                let seed = rng::derive(self.spec.seed, t as u64);
                let idx = if self.bootstrap {
                    let mut r = rng::rng(rng::derive(seed, 0));
                    (0..n).map(|_| r.random_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                Cart::grow(&sample.points, &weights, idx, params, rng::derive(seed, 1))
            })
            .collect();
        self.schema = Some(schema);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        let votes = self.fitted.iter().filter(|t| t.label(x).is_one()).count();
        Ok(votes as f64 / self.fitted.len() as f64)
    }

    fn reset(&mut self) {
        self.fitted.clear();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        !self.fitted.is_empty()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}

/// Discrete AdaBoost (SAMME, two classes) over depth-1 trees. The score is
/// the α-weighted share of stumps voting 1.
#[derive(Debug, Clone)]
pub struct AdaBoost {
    spec: LearnerSpec,
    rounds: usize,
    stumps: Vec<(f64, Cart)>,
    schema: Option<Schema>,
}

/// Weight of a stump with zero training error.
const PERFECT_ALPHA: f64 = 10.0;

impl AdaBoost {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::AdaBoost {
            return Err(Error::Config(format!("{} is not adaboost", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            rounds: spec.get_usize("rounds", DEFAULT_ENSEMBLE, 1)?,
            stumps: Vec::new(),
            schema: None,
        })
    }

    pub fn stumps(&self) -> usize {
        self.stumps.len()
    }
}

impl Classifier for AdaBoost {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        let n = sample.len();
        let params = TreeParams {
            max_depth: 1,
            ..TreeParams::default()
        };
        let mut w = vec![1.0 / n as f64; n];
        self.stumps.clear();
        for _ in 0..self.rounds {
            let stump = Cart::grow(&sample.points, &w, (0..n).collect(), params, 0);
            let wrong: Vec<bool> = sample.iter().map(|(x, y)| stump.label(x) != *y).collect();
            let err: f64 = w.iter().zip(&wrong).filter(|(_, &b)| b).map(|(w, _)| w).sum::<f64>()
                / w.iter().sum::<f64>();
            if err >= 0.5 {
                // No better than chance: keep the first stump so the model
                // is usable, otherwise stop.
                if self.stumps.is_empty() {
                    self.stumps.push((1.0, stump));
                }
                break;
            }
            if err <= 0.0 {
                self.stumps.push((PERFECT_ALPHA, stump));
                break;
            }
            let alpha = ((1.0 - err) / err).ln();
            for (wi, &b) in w.iter_mut().zip(&wrong) {
                if b {
                    *wi *= alpha.exp();
                }
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|wi| *wi /= total);
            self.stumps.push((alpha, stump));
        }
        self.schema = Some(schema);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        let total: f64 = self.stumps.iter().map(|(a, _)| a).sum();
        let ones: f64 = self
            .stumps
            .iter()
            .filter(|(_, s)| s.label(x).is_one())
            .map(|(a, _)| a)
            .sum();
        Ok(ones / total)
    }

    fn reset(&mut self) {
        self.stumps.clear();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        !self.stumps.is_empty()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
