//! The 2×2 drift-grid experiments and the stream demo.
//!
//! Every repetition regenerates (or reshuffles) its pool, re-segments it and
//! draws fresh windows; all seeds come from [`cell_seed`], so results do not
//! depend on thread scheduling.

use std::collections::BTreeMap;

use driftlab_core::engine::{run_stream, DetectorSpec, Policy, StreamLog, StreamSource, DEFAULT_INIT};
use driftlab_core::learners;
use driftlab_core::rng::{derive, derive_tag, rng};
use driftlab_core::streams::{binarize, build_2x2, permute, sample_window, DriftScenario};
use driftlab_core::{LossFunction, Sample};
use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::config::{model_label, DatasetSpec, ExperimentConfig};
use crate::error::{Error, Result};
use crate::results::{usage_metric, MetricRow, ResultRow, ResultTable};
use crate::stats::mean;

/// `hash(master, dataset, condition, repetition)`.
pub fn cell_seed(master: u64, dataset: usize, tag: &str, repetition: usize) -> u64 {
    derive(derive(derive_tag(master, tag), dataset as u64), repetition as u64)
}

pub type Cell = (usize, usize);

/// Train window(s) and test window of one condition, as `(i, j)` cells of
/// the grid `D_ij(X, Y) = D_i(X) · D_j(Y | X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    None,
    Real,
    Virtual,
    Both,
    /// Trained on `D01` alone, tested on `D00`.
    OtherReal,
    /// Trained on `D10` alone, tested on `D00`.
    OtherVirtual,
    ComposedReal,
    ComposedVirtual,
}

impl Condition {
    pub const DRIFT_TYPES: [Condition; 4] = [Condition::None, Condition::Real, Condition::Virtual, Condition::Both];
    pub const COMPOSED: [Condition; 7] = [
        Condition::None,
        Condition::Real,
        Condition::Virtual,
        Condition::OtherReal,
        Condition::OtherVirtual,
        Condition::ComposedReal,
        Condition::ComposedVirtual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::None => "none",
            Condition::Real => "real",
            Condition::Virtual => "virtual",
            Condition::Both => "both",
            Condition::OtherReal => "other-real",
            Condition::OtherVirtual => "other-virtual",
            Condition::ComposedReal => "composed-real",
            Condition::ComposedVirtual => "composed-virtual",
        }
    }

    pub fn train(self) -> &'static [Cell] {
        match self {
            Condition::None | Condition::Real | Condition::Virtual | Condition::Both => &[(0, 0)],
            Condition::OtherReal => &[(0, 1)],
            Condition::OtherVirtual => &[(1, 0)],
            Condition::ComposedReal => &[(0, 0), (0, 1)],
            Condition::ComposedVirtual => &[(0, 0), (1, 0)],
        }
    }

    pub fn test(self) -> Cell {
        match self {
            Condition::Real => (0, 1),
            Condition::Virtual => (1, 0),
            Condition::Both => (1, 1),
            _ => (0, 0),
        }
    }
}

fn cell_tag(prefix: &str, (i, j): Cell) -> String {
    format!("{prefix}:D{i}{j}")
}

/// Datasets resolved once per run; files are read once and reshuffled per
/// repetition, generators draw a fresh pool per repetition.
enum Source {
    Generator(DatasetSpec),
    Table(driftlab_core::streams::DatasetTable),
}

fn open(spec: &DatasetSpec) -> Result<Source> {
    if spec.is_file() {
        Ok(Source::Table(spec.load(0, 0)?))
    } else {
        Ok(Source::Generator(spec.clone()))
    }
}

fn scenario(source: &Source, cfg: &ExperimentConfig, d: usize, r: usize) -> Result<DriftScenario> {
    let s = |tag: &str| cell_seed(cfg.seed, d, tag, r);
    let table = match source {
        Source::Generator(spec) => spec.load(cfg.pool, s("pool"))?,
        Source::Table(t) => t.clone(),
    };
    let (table, _) = binarize(&permute(&table, s("permute")), s("binarize"))?;
    Ok(build_2x2(&table, cfg.depth, s("segment"))?)
}

/// Concatenation of the windows in a seeded random order, so that no
/// learner can pick up which window a point came from by its position.
fn union(parts: &[&Sample], seed: u64) -> Result<Sample> {
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out = out.union(p)?;
    }
    if parts.len() > 1 {
        out.points.shuffle(&mut rng(seed));
    }
    Ok(out)
}

fn run_repetition(
    source: &Source,
    cfg: &ExperimentConfig,
    name: &str,
    d: usize,
    r: usize,
    conditions: &[Condition],
) -> Result<Vec<ResultRow>> {
    let scn = scenario(source, cfg, d, r)?;
    let mut train: BTreeMap<Cell, Sample> = BTreeMap::new();
    let mut test: BTreeMap<Cell, Sample> = BTreeMap::new();
    for c in conditions {
        for &cell in c.train() {
            if !train.contains_key(&cell) {
                let s = sample_window(&scn, cell.0, cell.1, cfg.train, cell_seed(cfg.seed, d, &cell_tag("train", cell), r))?;
                train.insert(cell, s);
            }
        }
        let cell = c.test();
        if !test.contains_key(&cell) {
            let s = sample_window(&scn, cell.0, cell.1, cfg.test, cell_seed(cfg.seed, d, &cell_tag("test", cell), r))?;
            test.insert(cell, s);
        }
    }

    let mut rows = Vec::new();
    for (k, spec) in cfg.models.iter().enumerate() {
        let model_name = model_label(spec);
        // conditions sharing a training set share the fitted model
        let mut fitted: Vec<(&'static [Cell], Box<dyn learners::Classifier>)> = Vec::new();
        for c in conditions {
            let cells = c.train();
            if !fitted.iter().any(|(t, _)| *t == cells) {
                let parts: Vec<&Sample> = cells.iter().map(|c| &train[c]).collect();
                let key: Vec<String> = cells.iter().map(|&c| cell_tag("", c)).collect();
                let key = key.concat();
                let seed = cell_seed(cfg.seed, d, &format!("model:{k}{key}"), r);
                let sample = union(&parts, cell_seed(cfg.seed, d, &format!("union{key}"), r))?;
                fitted.push((cells, learners::fit(&spec.clone().with_seed(seed), &sample)?));
            }
            let model = &fitted.iter().find(|(t, _)| *t == cells).expect("fitted above").1;
            rows.push(ResultRow {
                dataset: name.to_string(),
                model: model_name.clone(),
                condition: c.name().to_string(),
                repetition: r,
                accuracy: learners::accuracy(model.as_ref(), &test[&c.test()])?,
            });
        }
    }
    Ok(rows)
}

/// Accuracies for every (dataset, model, condition, repetition). A dataset
/// that fails to load or segment is recorded in `failures` and skipped.
pub fn run_grid(cfg: &ExperimentConfig, conditions: &[Condition]) -> Result<ResultTable> {
    cfg.validate()?;
    let mut table = ResultTable::new(cfg.experiment.name());
    for (d, spec) in cfg.datasets.iter().enumerate() {
        let name = spec.name();
        let rows = open(spec).and_then(|source| {
            (0..cfg.repetitions)
                .into_par_iter()
                .map(|r| run_repetition(&source, cfg, &name, d, r, conditions))
                .collect::<Result<Vec<_>>>()
        });
        match rows {
            Ok(rows) => {
                for row in rows.into_iter().flatten() {
                    table.push(row)?;
                }
            }
            Err(e) => table.failures.push((name, e.to_string())),
        }
    }
    table.aggregate();
    Ok(table)
}

fn add_tests(table: &mut ResultTable, pairs: &[(Condition, Condition)], alpha: f64) -> Result<()> {
    for d in table.datasets() {
        for m in table.models() {
            for (a, b) in pairs {
                table.add_test(&d, &m, a.name(), b.name(), alpha)?;
            }
        }
    }
    Ok(())
}

/// Train on `D00`; test on `D00`, `D01`, `D10`, `D11`.
pub fn cmd_drift_types(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = run_grid(cfg, &Condition::DRIFT_TYPES)?;
    add_tests(
        &mut table,
        &[
            (Condition::None, Condition::Real),
            (Condition::None, Condition::Virtual),
            (Condition::Virtual, Condition::Both),
        ],
        cfg.alpha,
    )?;
    Ok(table)
}

/// Training on the union of two windows that differ in one drift type,
/// tested on `D00`, against the single-window baselines.
pub fn cmd_composed(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = run_grid(cfg, &Condition::COMPOSED)?;
    add_tests(
        &mut table,
        &[
            (Condition::None, Condition::ComposedReal),
            (Condition::None, Condition::ComposedVirtual),
            (Condition::ComposedReal, Condition::OtherReal),
            (Condition::ComposedVirtual, Condition::OtherVirtual),
        ],
        cfg.alpha,
    )?;
    Ok(table)
}

/// Composed-window results plus the usage metric per (dataset, model). The
/// virtual reference is the model trained on `D10` alone, so all three
/// accuracies are measured on `D00`.
pub fn cmd_usage_metric(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut table = cmd_composed(cfg)?;
    table.experiment = cfg.experiment.name().into();
    let m = |d: &str, model: &str, c: Condition| table.get(d, model, c.name()).map(|a| a.mean);
    let mut metrics = Vec::new();
    for d in table.datasets() {
        for model in table.models() {
            if let (Some(n), Some(v), Some(c)) = (
                m(&d, &model, Condition::None),
                m(&d, &model, Condition::OtherVirtual),
                m(&d, &model, Condition::ComposedVirtual),
            ) {
                metrics.push(MetricRow {
                    dataset: d.clone(),
                    model: model.clone(),
                    metric: "usage".into(),
                    value: usage_metric(n, v, c),
                });
            }
        }
    }
    table.metrics = metrics;
    Ok(table)
}

pub const STREAM_POLICIES: [&str; 3] = ["passive", "active", "hybrid"];

/// Per-run stream logs kept for the first repetition.
pub type StreamLogs = Vec<(String, String, String, StreamLog)>;

/// Abrupt label switch halfway through a `stream_len` stream drawn from
/// `D00` then `D01`; accuracy is `1 − mean ITTE` per policy.
pub fn cmd_stream_demo(cfg: &ExperimentConfig) -> Result<(ResultTable, StreamLogs)> {
    cfg.validate()?;
    let half = cfg.stream_len / 2;
    if half <= DEFAULT_INIT {
        return Err(Error::Config(format!(
            "stream-len must exceed {} so each concept outlasts the warm-up",
            2 * DEFAULT_INIT
        )));
    }
    let policies: Vec<Policy> = STREAM_POLICIES
        .iter()
        .map(|p| p.parse().map_err(Error::from))
        .collect::<Result<_>>()?;
    let detector = DetectorSpec::sliding(100, 4.0);
    let mut table = ResultTable::new(cfg.experiment.name());
    let mut logs = Vec::new();
    for (d, spec) in cfg.datasets.iter().enumerate() {
        let name = spec.name();
        let run = |source: &Source, r: usize| -> Result<Vec<(ResultRow, Option<StreamLog>)>> {
            let scn = scenario(source, cfg, d, r)?;
            let a = sample_window(&scn, 0, 0, half, cell_seed(cfg.seed, d, "stream:D00", r))?;
            let b = sample_window(&scn, 0, 1, cfg.stream_len - half, cell_seed(cfg.seed, d, "stream:D01", r))?;
            let stream = StreamSource::from_segments(&[a, b])?;
            let mut out = Vec::new();
            for (k, model) in cfg.models.iter().enumerate() {
                for (policy, pname) in policies.iter().zip(STREAM_POLICIES) {
                    let seed = cell_seed(cfg.seed, d, &format!("stream-model:{k}"), r);
                    let log = run_stream(&stream, model, &detector, *policy, LossFunction::ZeroOne, DEFAULT_INIT, seed)?;
                    let row = ResultRow {
                        dataset: name.clone(),
                        model: model_label(model),
                        condition: pname.to_string(),
                        repetition: r,
                        accuracy: 1.0 - log.mean_itte(),
                    };
                    out.push((row, (r == 0).then_some(log)));
                }
            }
            Ok(out)
        };
        let res = open(spec).and_then(|source| {
            (0..cfg.repetitions)
                .into_par_iter()
                .map(|r| run(&source, r))
                .collect::<Result<Vec<_>>>()
        });
        match res {
            Ok(reps) => {
                for (row, log) in reps.into_iter().flatten() {
                    if let Some(log) = log {
                        logs.push((row.dataset.clone(), row.model.clone(), row.condition.clone(), log));
                    }
                    table.push(row)?;
                }
            }
            Err(e) => table.failures.push((name, e.to_string())),
        }
    }
    table.aggregate();
    if cfg.repetitions >= 2 {
        for d in table.datasets() {
            for m in table.models() {
                table.add_test(&d, &m, "passive", "active", cfg.alpha)?;
                table.add_test(&d, &m, "passive", "hybrid", cfg.alpha)?;
            }
        }
    }
    Ok((table, logs))
}

/// Mean accuracy per condition over all datasets and models.
pub fn condition_means(table: &ResultTable) -> Vec<(String, f64)> {
    table
        .conditions()
        .into_iter()
        .map(|c| {
            let v: Vec<f64> = table.rows.iter().filter(|r| r.condition == c).map(|r| r.accuracy).collect();
            (c, mean(&v))
        })
        .collect()
}
