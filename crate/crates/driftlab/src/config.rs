//! Experiment configuration: defaults, `key=value` files, validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use driftlab_core::learners::{LearnerKind, LearnerSpec};
use driftlab_core::streams::{load_csv, GeneratorConfig, SchemaDescriptor, DEFAULT_SEGMENT_DEPTH};
use driftlab_core::streams::DatasetTable;

use crate::error::{Error, Result};

pub const DEFAULT_REPETITIONS: usize = 100;
pub const FULL_SCALE_REPETITIONS: usize = 1000;
pub const DEFAULT_TRAIN: usize = 500;
pub const DEFAULT_TEST: usize = 500;
/// Rows generated per repetition before segmentation; windows are drawn
/// with replacement from the two partitions of this pool.
pub const DEFAULT_POOL: usize = 10_000;
pub const DEFAULT_RANDOM_INSTANCES: usize = 1000;
pub const DEFAULT_STREAM_LEN: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    DriftTypes,
    Composed,
    UsageMetric,
    VerifyTheory,
    StreamDemo,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::DriftTypes,
        Experiment::Composed,
        Experiment::UsageMetric,
        Experiment::VerifyTheory,
        Experiment::StreamDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DriftTypes => "drift-types",
            Experiment::Composed => "composed",
            Experiment::UsageMetric => "usage-metric",
            Experiment::VerifyTheory => "verify-theory",
            Experiment::StreamDemo => "stream-demo",
        }
    }

    /// Experiments reporting Welch tests need two repetitions at least.
    fn needs_tests(self) -> bool {
        matches!(self, Experiment::DriftTypes | Experiment::Composed | Experiment::UsageMetric)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// A synthetic generator or a user-supplied CSV file with its schema.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    Generator(GeneratorConfig),
    Csv { data: PathBuf, schema: PathBuf },
}

impl DatasetSpec {
    pub fn name(&self) -> String {
        match self {
            DatasetSpec::Generator(g) if g.params.is_empty() => g.kind.name().to_string(),
            DatasetSpec::Generator(g) => {
                let params: Vec<String> = g.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                format!("{}:{}", g.kind, params.join(","))
            }
            DatasetSpec::Csv { data, .. } => data
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| data.display().to_string()),
        }
    }

    /// `n` fresh rows (generators) or the whole file (CSV; `n` ignored).
    pub fn load(&self, n: usize, seed: u64) -> Result<DatasetTable> {
        let mut table = match self {
            DatasetSpec::Generator(g) => {
                let cfg = g.clone().with_seed(driftlab_core::rng::derive(seed, g.seed));
                driftlab_core::streams::generate(&cfg, n)?
            }
            DatasetSpec::Csv { data, schema } => load_csv(data, &SchemaDescriptor::from_file(schema)?)?,
        };
        table.name = self.name();
        Ok(table)
    }

    pub fn is_file(&self) -> bool {
        matches!(self, DatasetSpec::Csv { .. })
    }
}

impl FromStr for DatasetSpec {
    type Err = Error;

    /// `csv:DATA[:SCHEMA]` (schema defaults to `DATA` with a `.schema`
    /// extension) or a generator string such as `sea:concept=2,noise=0.1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("csv:") {
            let (data, schema) = match rest.split_once(':') {
                Some((d, sc)) => (PathBuf::from(d), PathBuf::from(sc)),
                None => (PathBuf::from(rest), Path::new(rest).with_extension("schema")),
            };
            return Ok(DatasetSpec::Csv { data, schema });
        }
        Ok(DatasetSpec::Generator(s.parse()?))
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetSpec::Generator(g) => write!(f, "{g}"),
            DatasetSpec::Csv { data, schema } => write!(f, "csv:{}:{}", data.display(), schema.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub datasets: Vec<DatasetSpec>,
    pub models: Vec<LearnerSpec>,
    pub repetitions: usize,
    pub train: usize,
    pub test: usize,
    pub pool: usize,
    pub depth: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub alpha: f64,
    /// Random instances for the theory suite.
    pub random: usize,
    pub stream_len: usize,
}

pub fn default_datasets() -> Vec<DatasetSpec> {
    ["sea", "sine", "stagger"]
        .iter()
        .map(|s| s.parse().expect("built-in generator names parse"))
        .collect()
}

pub fn default_models() -> Vec<LearnerSpec> {
    LearnerKind::BENCHMARK.into_iter().map(LearnerSpec::new).collect()
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            datasets: default_datasets(),
            models: default_models(),
            repetitions: DEFAULT_REPETITIONS,
            train: DEFAULT_TRAIN,
            test: DEFAULT_TEST,
            pool: DEFAULT_POOL,
            depth: DEFAULT_SEGMENT_DEPTH,
            seed: 0,
            out: PathBuf::from("results"),
            alpha: crate::results::DEFAULT_ALPHA,
            random: DEFAULT_RANDOM_INSTANCES,
            stream_len: DEFAULT_STREAM_LEN,
        }
    }

    /// Applies one `key=value` setting. List values are whitespace separated.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "experiment" => self.experiment = value.parse()?,
            "datasets" => {
                self.datasets = value.split_whitespace().map(str::parse).collect::<Result<_>>()?;
            }
            "models" => {
                self.models = value
                    .split_whitespace()
                    .map(|m| m.parse().map_err(Error::from))
                    .collect::<Result<_>>()?;
            }
            "reps" | "repetitions" => self.repetitions = parse(key, value)?,
            "train" => self.train = parse(key, value)?,
            "test" => self.test = parse(key, value)?,
            "pool" => self.pool = parse(key, value)?,
            "depth" => self.depth = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "alpha" => self.alpha = parse(key, value)?,
            "random" => self.random = parse(key, value)?,
            "stream-len" => self.stream_len = parse(key, value)?,
            "full-scale" => {
                if parse::<bool>(key, value)? {
                    self.repetitions = FULL_SCALE_REPETITIONS;
                }
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Reads `key=value` lines; `#` starts a comment.
    pub fn parse_text(experiment: Experiment, text: &str) -> Result<Self> {
        let mut cfg = Self::new(experiment);
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got `{line}`", i + 1)))?;
            cfg.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn from_file(experiment: Experiment, path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_text(experiment, &std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment.needs_tests() && self.repetitions < 2 {
            return Err(Error::Config(format!(
                "{} runs t-tests and needs at least 2 repetitions",
                self.experiment
            )));
        }
        for (name, v) in [
            ("reps", self.repetitions),
            ("train", self.train),
            ("test", self.test),
            ("pool", self.pool),
            ("depth", self.depth),
            ("stream-len", self.stream_len),
        ] {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be at least 1")));
            }
        }
        if self.datasets.is_empty() || self.models.is_empty() {
            return Err(Error::Config("need at least one dataset and one model".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1)", self.alpha)));
        }
        Ok(())
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse `{key}={value}`")))
}

/// Column label for a model: the short name unless hyperparameters are set.
pub fn model_label(spec: &LearnerSpec) -> String {
    if spec.params.is_empty() {
        spec.kind.short().to_string()
    } else {
        spec.to_string()
    }
}
