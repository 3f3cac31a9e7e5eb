//! k-nearest neighbours over a bounded FIFO buffer.

use std::collections::VecDeque;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::types::{Instance, Label, Schema};

use super::prep::Standardizer;
use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

/// Distances use numeric features z-scored with fit-time statistics plus
/// one unit per mismatching categorical; ties go to the earlier point.
#[derive(Debug, Clone)]
pub struct Knn {
    spec: LearnerSpec,
    k: usize,
    window: usize,
    std: Standardizer,
    /// `(insertion sequence, point)`, oldest first.
    buffer: VecDeque<(u64, Instance, Label)>,
    next_seq: u64,
    schema: Option<Schema>,
}

impl Knn {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::Knn {
            return Err(Error::Config(format!("{} is not knn", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            k: spec.get_usize("k", 5, 1)?,
            window: spec.get_usize("window", 2000, 1)?,
            std: Standardizer::default(),
            buffer: VecDeque::new(),
            next_seq: 0,
            schema: None,
        })
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    /// Buffered points, oldest first.
    pub fn buffered(&self) -> impl Iterator<Item = (&Instance, Label)> {
        self.buffer.iter().map(|(_, x, y)| (x, *y))
    }

    fn push(&mut self, x: Instance, y: Label) {
        if self.buffer.len() == self.window {
            self.buffer.pop_front();
        }
        self.buffer.push_back((self.next_seq, x, y));
        self.next_seq += 1;
    }

    fn distance2(&self, a: &Instance, b: &Instance) -> f64 {
        let num: f64 = a
            .numeric
            .iter()
            .zip(&b.numeric)
            .enumerate()
            .map(|(i, (u, v))| ((u - v) / self.std.scale[i]).powi(2))
            .sum();
        let cat = a.categorical.iter().zip(&b.categorical).filter(|(u, v)| u != v).count();
        num + cat as f64
    }

    fn neighbours(&self, x: &Instance) -> Vec<(f64, u64, Label)> {
        let mut d: Vec<(f64, u64, Label)> = self
            .buffer
            .iter()
            .map(|(seq, p, y)| (self.distance2(x, p), *seq, *y))
            .collect();
        let k = self.k.min(d.len());
        let cmp = |a: &(f64, u64, Label), b: &(f64, u64, Label)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < d.len() {
            d.select_nth_unstable_by(k, cmp);
            d.truncate(k);
        }
        d.sort_by(cmp);
        d
    }
}

impl Classifier for Knn {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        self.std = Standardizer::fit(sample);
        self.buffer.clear();
        for (x, y) in sample.iter() {
            self.push(x.clone(), *y);
        }
        self.schema = Some(schema);
        Ok(())
    }

    fn update(&mut self, x: &Instance, y: Label) -> Result<()> {
        check_query(self.schema, x)?;
        self.push(x.clone(), y);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        let nn = self.neighbours(x);
        let ones = nn.iter().filter(|n| n.2.is_one()).count();
        Ok(ones as f64 / nn.len() as f64)
    }

    fn predict(&self, x: &Instance) -> Result<Label> {
        check_query(self.schema, x)?;
        let nn = self.neighbours(x);
        let ones = nn.iter().filter(|n| n.2.is_one()).count();
        Ok(match (2 * ones).cmp(&nn.len()) {
            std::cmp::Ordering::Greater => Label::ONE,
            std::cmp::Ordering::Less => Label::ZERO,
            // even split: the nearest neighbour decides
            std::cmp::Ordering::Equal => nn[0].2,
        })
    }

    fn reset(&mut self) {
        self.buffer.clear();
        self.next_seq = 0;
        self.std = Standardizer::default();
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.schema.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
