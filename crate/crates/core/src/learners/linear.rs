//! Perceptron and Pegasos linear SVM on encoded features.

use rand::seq::SliceRandom;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::rng;
use crate::types::{Instance, Label, Schema};

use super::prep::{dot, logistic, Encoder};
use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

fn sign(y: Label) -> f64 {
    if y.is_one() {
        1.0
    } else {
        -1.0
    }
}

fn encoded(enc: &Encoder, sample: &Sample) -> Vec<(Vec<f64>, f64)> {
    sample.iter().map(|(x, y)| (enc.encode(x), sign(*y))).collect()
}

/// Classic mistake-driven perceptron; stops early after an error-free epoch.
#[derive(Debug, Clone)]
pub struct Perceptron {
    spec: LearnerSpec,
    epochs: usize,
    lr: f64,
    enc: Encoder,
    w: Vec<f64>,
    schema: Option<Schema>,
}

impl Perceptron {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::Perceptron {
            return Err(Error::Config(format!("{} is not a perceptron", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            epochs: spec.get_usize("epochs", 10, 1)?,
            lr: spec.get_positive("lr", 1.0)?,
            enc: Encoder::default(),
            w: Vec::new(),
            schema: None,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    /// One perceptron step; returns whether the point was a mistake.
    fn step(&mut self, z: &[f64], y: f64) -> bool {
        if y * dot(&self.w, z) > 0.0 {
            return false;
        }
        for (wi, zi) in self.w.iter_mut().zip(z) {
            *wi += self.lr * y * zi;
        }
        true
    }
}

impl Classifier for Perceptron {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        self.enc = Encoder::fit(sample);
        self.w = vec![0.0; self.enc.width()];
        let mut r = rng::rng(self.spec.seed);
        let data = encoded(&self.enc, sample);
        let mut order: Vec<usize> = (0..data.len()).collect();
        for _ in 0..self.epochs {
            order.shuffle(&mut r);
            let mut mistakes = 0;
            for &i in &order {
                mistakes += self.step(&data[i].0, data[i].1) as usize;
            }
            if mistakes == 0 {
                break;
            }
        }
        self.schema = Some(schema);
        Ok(())
    }

    fn update(&mut self, x: &Instance, y: Label) -> Result<()> {
        check_query(self.schema, x)?;
        let z = self.enc.encode(x);
        self.step(&z, sign(y));
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        Ok(logistic(dot(&self.w, &self.enc.encode(x))))
    }

    fn predict(&self, x: &Instance) -> Result<Label> {
        check_query(self.schema, x)?;
        Ok(Label::from_bool(dot(&self.w, &self.enc.encode(x)) > 0.0))
    }

    fn reset(&mut self) {
        self.w.clear();
        self.enc = Encoder::default();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.schema.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}

/// Hinge loss with L2 penalty, Pegasos steps `1/(λt)` and projection onto
/// the ball of radius `1/√λ`. The bias is an (also regularized) extra
/// feature.
#[derive(Debug, Clone)]
pub struct LinearSvm {
    spec: LearnerSpec,
    lambda: f64,
    epochs: usize,
    enc: Encoder,
    w: Vec<f64>,
    t: u64,
    schema: Option<Schema>,
}

impl LinearSvm {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::LinearSvm {
            return Err(Error::Config(format!("{} is not a linear svm", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            lambda: spec.get_positive("lambda", 1e-4)?,
            epochs: spec.get_usize("epochs", 5, 1)?,
            enc: Encoder::default(),
            w: Vec::new(),
            t: 0,
            schema: None,
        })
    }

    fn step(&mut self, z: &[f64], y: f64) {
        self.t += 1;
        let eta = 1.0 / (self.lambda * self.t as f64);
        let margin = y * dot(&self.w, z);
        let shrink = 1.0 - eta * self.lambda;
        for wi in self.w.iter_mut() {
            *wi *= shrink;
        }
        if margin < 1.0 {
            for (wi, zi) in self.w.iter_mut().zip(z) {
                *wi += eta * y * zi;
            }
        }
        let norm = dot(&self.w, &self.w).sqrt();
        let radius = 1.0 / self.lambda.sqrt();
        if norm > radius {
            let s = radius / norm;
            self.w.iter_mut().for_each(|wi| *wi *= s);
        }
    }
}

impl Classifier for LinearSvm {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        self.enc = Encoder::fit(sample);
        self.w = vec![0.0; self.enc.width()];
        self.t = 0;
        let data = encoded(&self.enc, sample);
        let mut r = rng::rng(self.spec.seed);
        let mut order: Vec<usize> = (0..data.len()).collect();
        for _ in 0..self.epochs {
            order.shuffle(&mut r);
            for &i in &order {
                self.step(&data[i].0, data[i].1);
            }
        }
        self.schema = Some(schema);
        Ok(())
    }

    fn update(&mut self, x: &Instance, y: Label) -> Result<()> {
        check_query(self.schema, x)?;
        let z = self.enc.encode(x);
        self.step(&z, sign(y));
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        Ok(logistic(dot(&self.w, &self.enc.encode(x))))
    }

    fn predict(&self, x: &Instance) -> Result<Label> {
        check_query(self.schema, x)?;
        Ok(Label::from_bool(dot(&self.w, &self.enc.encode(x)) > 0.0))
    }

    fn reset(&mut self) {
        self.w.clear();
        self.t = 0;
        self.enc = Encoder::default();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.schema.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
