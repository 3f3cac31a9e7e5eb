//! Per-repetition accuracies, their aggregates and significance tests.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::stats::{mean, std_dev, welch_t_test};

/// Label written next to every test result; the tests are unpaired and no
/// multiplicity correction is applied.
pub const TEST_FAMILY: &str = "welch-two-sided-unpaired-uncorrected";

pub const DEFAULT_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset: String,
    pub model: String,
    pub condition: String,
    pub repetition: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub dataset: String,
    pub model: String,
    pub condition: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub dataset: String,
    pub model: String,
    pub a: String,
    pub b: String,
    pub mean_a: f64,
    pub mean_b: f64,
    pub t: f64,
    pub dof: f64,
    pub p: f64,
    pub significant: bool,
}

/// A derived per-(dataset, model) quantity; `None` when undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub dataset: String,
    pub model: String,
    pub metric: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub experiment: String,
    pub rows: Vec<ResultRow>,
    pub aggregates: Vec<Aggregate>,
    pub tests: Vec<TestResult>,
    pub metrics: Vec<MetricRow>,
    /// Datasets that could not be loaded, with the reason.
    pub failures: Vec<(String, String)>,
}

type Key = (String, String, String);

impl ResultTable {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: ResultRow) -> Result<()> {
        if !(0.0..=1.0).contains(&row.accuracy) {
            return Err(Error::Inconsistent(format!(
                "accuracy {} outside [0, 1] for {}/{}/{}",
                row.accuracy, row.dataset, row.model, row.condition
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Absorbs another table's rows, tests, metrics and failures.
    pub fn extend(&mut self, other: ResultTable) {
        self.rows.extend(other.rows);
        self.tests.extend(other.tests);
        self.metrics.extend(other.metrics);
        self.failures.extend(other.failures);
        self.aggregate();
    }

    fn grouped(&self) -> Vec<(Key, Vec<f64>)> {
        let mut order: Vec<Key> = Vec::new();
        let mut groups: BTreeMap<Key, Vec<f64>> = BTreeMap::new();
        for r in &self.rows {
            let key = (r.dataset.clone(), r.model.clone(), r.condition.clone());
            groups
                .entry(key.clone())
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(r.accuracy);
        }
        order
            .into_iter()
            .map(|k| {
                let v = groups.remove(&k).unwrap_or_default();
                (k, v)
            })
            .collect()
    }

    fn compute_aggregates(&self) -> Vec<Aggregate> {
        self.grouped()
            .into_iter()
            .map(|((dataset, model, condition), acc)| Aggregate {
                dataset,
                model,
                condition,
                n: acc.len(),
                mean: mean(&acc),
                std: std_dev(&acc),
            })
            .collect()
    }

    /// Recomputes the aggregates from the rows, in first-appearance order.
    pub fn aggregate(&mut self) {
        self.aggregates = self.compute_aggregates();
    }

    /// Errors unless every stored aggregate matches a recomputation.
    pub fn check_aggregates(&self) -> Result<()> {
        let fresh = self.compute_aggregates();
        if fresh.len() != self.aggregates.len() {
            return Err(Error::Inconsistent(format!(
                "{} aggregates stored, {} recomputed",
                self.aggregates.len(),
                fresh.len()
            )));
        }
        for (a, b) in self.aggregates.iter().zip(&fresh) {
            let same_key = (&a.dataset, &a.model, &a.condition) == (&b.dataset, &b.model, &b.condition);
            if !same_key || a.n != b.n || (a.mean - b.mean).abs() > 1e-12 || (a.std - b.std).abs() > 1e-12 {
                return Err(Error::Inconsistent(format!(
                    "aggregate {}/{}/{} does not match its rows",
                    a.dataset, a.model, a.condition
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, dataset: &str, model: &str, condition: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.dataset == dataset && a.model == model && a.condition == condition)
    }

    pub fn accuracies(&self, dataset: &str, model: &str, condition: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.dataset == dataset && r.model == model && r.condition == condition)
            .map(|r| r.accuracy)
            .collect()
    }

    /// Distinct values in first-appearance order.
    pub fn datasets(&self) -> Vec<String> {
        distinct(self.rows.iter().map(|r| &r.dataset))
    }

    pub fn models(&self) -> Vec<String> {
        distinct(self.rows.iter().map(|r| &r.model))
    }

    pub fn conditions(&self) -> Vec<String> {
        distinct(self.rows.iter().map(|r| &r.condition))
    }

    /// Welch test of condition `a` against `b` for one (dataset, model).
    pub fn add_test(&mut self, dataset: &str, model: &str, a: &str, b: &str, alpha: f64) -> Result<TestResult> {
        let xa = self.accuracies(dataset, model, a);
        let xb = self.accuracies(dataset, model, b);
        let w = welch_t_test(&xa, &xb)?;
        let res = TestResult {
            dataset: dataset.into(),
            model: model.into(),
            a: a.into(),
            b: b.into(),
            mean_a: mean(&xa),
            mean_b: mean(&xb),
            t: w.t,
            dof: w.dof,
            p: w.p,
            significant: w.significant(alpha),
        };
        self.tests.push(res.clone());
        Ok(res)
    }

    pub fn test(&self, dataset: &str, model: &str, a: &str, b: &str) -> Option<&TestResult> {
        self.tests
            .iter()
            .find(|t| t.dataset == dataset && t.model == model && t.a == a && t.b == b)
    }

    pub fn metric(&self, dataset: &str, model: &str, metric: &str) -> Option<&MetricRow> {
        self.metrics
            .iter()
            .find(|m| m.dataset == dataset && m.model == model && m.metric == metric)
    }
}

fn distinct<'a>(it: impl Iterator<Item = &'a String>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for s in it {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    out
}

/// `|(c − v) / (n − c)|` with `c` the composed-virtual, `v` the virtual and
/// `n` the no-drift accuracy. Undefined when `|n − c| < 1e-6`.
pub fn usage_metric(none: f64, virt: f64, composed: f64) -> Option<f64> {
    let denom = none - composed;
    if denom.abs() < 1e-6 {
        None
    } else {
        Some(((composed - virt) / denom).abs())
    }
}
