//! Naive Bayes: Gaussian on numeric features, Laplace-smoothed categorical
//! likelihoods; every statistic is a running one so updates are exact.

use std::collections::BTreeMap;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::types::{Instance, Label, Schema};

use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

#[derive(Debug, Clone, Default, PartialEq)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    /// Welford step.
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn var(&self) -> f64 {
        if self.n > 0.0 {
            self.m2 / self.n
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default)]
struct ClassStats {
    count: f64,
    numeric: Vec<Moments>,
    categorical: Vec<BTreeMap<u32, f64>>,
}

#[derive(Debug, Clone)]
pub struct GaussianNb {
    spec: LearnerSpec,
    smoothing: f64,
    classes: [ClassStats; 2],
    overall: Vec<Moments>,
    /// Distinct values seen per categorical feature.
    levels: Vec<BTreeMap<u32, ()>>,
    schema: Option<Schema>,
}

impl GaussianNb {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::Gnb {
            return Err(Error::Config(format!("{} is not naive bayes", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            smoothing: spec.get_positive("smoothing", 1e-9)?,
            classes: Default::default(),
            overall: Vec::new(),
            levels: Vec::new(),
            schema: None,
        })
    }

    /// Running mean of numeric feature `f` within class `y`.
    pub fn class_mean(&self, y: Label, f: usize) -> Option<f64> {
        self.classes[y.value() as usize].numeric.get(f).map(|m| m.mean)
    }

    fn init(&mut self, schema: Schema) {
        let blank = ClassStats {
            count: 0.0,
            numeric: vec![Moments::default(); schema.numeric],
            categorical: vec![BTreeMap::new(); schema.categorical],
        };
        self.classes = [blank.clone(), blank];
        self.overall = vec![Moments::default(); schema.numeric];
        self.levels = vec![BTreeMap::new(); schema.categorical];
        self.schema = Some(schema);
    }

    fn absorb(&mut self, x: &Instance, y: Label) {
        let c = &mut self.classes[y.value() as usize];
        c.count += 1.0;
        for ((m, o), v) in c.numeric.iter_mut().zip(self.overall.iter_mut()).zip(&x.numeric) {
            m.push(*v);
            o.push(*v);
        }
        for ((counts, lv), v) in c.categorical.iter_mut().zip(self.levels.iter_mut()).zip(&x.categorical) {
            *counts.entry(*v).or_insert(0.0) += 1.0;
            lv.insert(*v, ());
        }
    }

    fn log_joint(&self, x: &Instance, y: usize, eps: f64, total: f64) -> f64 {
        let c = &self.classes[y];
        let mut lp = (c.count / total).ln();
        for (m, v) in c.numeric.iter().zip(&x.numeric) {
            let var = m.var() + eps;
            lp += -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + (v - m.mean).powi(2) / var);
        }
        for ((counts, lv), v) in c.categorical.iter().zip(&self.levels).zip(&x.categorical) {
            let k = counts.get(v).copied().unwrap_or(0.0);
            lp += ((k + 1.0) / (c.count + lv.len() as f64 + 1.0)).ln();
        }
        lp
    }
}

impl Classifier for GaussianNb {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        self.init(check_fit_input(sample)?);
        for (x, y) in sample.iter() {
            self.absorb(x, *y);
        }
        Ok(())
    }

    fn update(&mut self, x: &Instance, y: Label) -> Result<()> {
        check_query(self.schema, x)?;
        self.absorb(x, y);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        let (n0, n1) = (self.classes[0].count, self.classes[1].count);
        if n0 == 0.0 || n1 == 0.0 {
            return Ok(if n1 > n0 { 1.0 } else { 0.0 });
        }
        let max_var = self.overall.iter().map(Moments::var).fold(0.0, f64::max);
        let eps = (self.smoothing * max_var).max(f64::MIN_POSITIVE.sqrt());
        let total = n0 + n1;
        let l0 = self.log_joint(x, 0, eps, total);
        let l1 = self.log_joint(x, 1, eps, total);
        Ok(1.0 / (1.0 + (l0 - l1).exp()))
    }

    fn reset(&mut self) {
        self.classes = Default::default();
        self.overall.clear();
        self.levels.clear();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.schema.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
