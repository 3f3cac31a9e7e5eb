//! Learner specifications parsed from strings like `knn:k=5` or
//! `rf:trees=10,depth=10`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LearnerKind {
    ErmFinite,
    Constant,
    Dt,
    Rf,
    Knn,
    Bagging,
    AdaBoost,
    Gnb,
    Perceptron,
    LinearSvm,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 10] = [
        LearnerKind::ErmFinite,
        LearnerKind::Constant,
        LearnerKind::Dt,
        LearnerKind::Rf,
        LearnerKind::Knn,
        LearnerKind::Bagging,
        LearnerKind::AdaBoost,
        LearnerKind::Gnb,
        LearnerKind::Perceptron,
        LearnerKind::LinearSvm,
    ];

    /// The eight benchmark models, in reporting order.
    pub const BENCHMARK: [LearnerKind; 8] = [
        LearnerKind::Dt,
        LearnerKind::Rf,
        LearnerKind::Knn,
        LearnerKind::Bagging,
        LearnerKind::AdaBoost,
        LearnerKind::Gnb,
        LearnerKind::Perceptron,
        LearnerKind::LinearSvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::ErmFinite => "erm-finite",
            LearnerKind::Constant => "constant",
            LearnerKind::Dt => "dt",
            LearnerKind::Rf => "rf",
            LearnerKind::Knn => "knn",
            LearnerKind::Bagging => "bagging",
            LearnerKind::AdaBoost => "adaboost",
            LearnerKind::Gnb => "gnb",
            LearnerKind::Perceptron => "perceptron",
            LearnerKind::LinearSvm => "linear-svm",
        }
    }

    /// Short label used in result tables.
    pub fn short(self) -> &'static str {
        match self {
            LearnerKind::ErmFinite => "ERM",
            LearnerKind::Constant => "Const",
            LearnerKind::Dt => "DT",
            LearnerKind::Rf => "RF",
            LearnerKind::Knn => "kNN",
            LearnerKind::Bagging => "Bag",
            LearnerKind::AdaBoost => "Ada",
            LearnerKind::Gnb => "NB",
            LearnerKind::Perceptron => "Prc",
            LearnerKind::LinearSvm => "SVM",
        }
    }

    /// Kinds that accept single-point updates.
    pub fn is_incremental(self) -> bool {
        matches!(
            self,
            LearnerKind::Knn | LearnerKind::Gnb | LearnerKind::Perceptron | LearnerKind::LinearSvm
        )
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            LearnerKind::ErmFinite => &["lo", "hi", "steps", "feature"],
            LearnerKind::Constant => &["label"],
            LearnerKind::Dt => &["depth", "min_leaf"],
            LearnerKind::Rf | LearnerKind::Bagging => {
                &["trees", "depth", "min_leaf", "max_features", "bootstrap"]
            }
            LearnerKind::AdaBoost => &["rounds"],
            LearnerKind::Knn => &["k", "window"],
            LearnerKind::Gnb => &["smoothing"],
            LearnerKind::Perceptron => &["epochs", "lr"],
            LearnerKind::LinearSvm => &["lambda", "epochs"],
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let alias = match s.as_str() {
            "erm" => "erm-finite",
            "tree" | "cart" => "dt",
            "nb" | "naive-bayes" => "gnb",
            "prc" => "perceptron",
            "svm" => "linear-svm",
            "ada" => "adaboost",
            "bag" => "bagging",
            "const" => "constant",
            other => other,
        };
        LearnerKind::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::Config(format!("unknown learner kind `{s}`")))
    }
}

/// A learner kind plus validated hyperparameters and a seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub params: BTreeMap<String, String>,
    pub seed: u64,
}

impl LearnerSpec {
    pub fn new(kind: LearnerKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Result<Self> {
        if key == "seed" {
            self.seed = parse_value(self.kind, key, &value.to_string())?;
            return Ok(self);
        }
        if !self.kind.allowed().contains(&key) {
            return Err(Error::Config(format!(
                "`{key}` is not a hyperparameter of {} (expected one of {})",
                self.kind,
                self.kind.allowed().join(", ")
            )));
        }
        self.params.insert(key.to_string(), value.to_string());
        self.validate()?;
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => parse_value(self.kind, key, v),
        }
    }

    pub fn get_usize(&self, key: &str, default: usize, min: usize) -> Result<usize> {
        let v: usize = self.get(key, default)?;
        if v < min {
            return Err(Error::Config(format!("{}: `{key}` must be at least {min}", self.kind)));
        }
        Ok(v)
    }

    pub fn get_positive(&self, key: &str, default: f64) -> Result<f64> {
        let v: f64 = self.get(key, default)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Config(format!("{}: `{key}` must be positive", self.kind)));
        }
        Ok(v)
    }

    /// Checks every hyperparameter by building the learner.
    pub fn validate(&self) -> Result<()> {
        super::build(self).map(|_| ())
    }
}

fn parse_value<T: FromStr>(kind: LearnerKind, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| Error::Config(format!("{kind}: cannot parse `{key}={v}`")))
}

impl FromStr for LearnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k, r),
            None => (s, ""),
        };
        let mut spec = LearnerSpec::new(kind.parse()?);
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
            spec = spec.with(k.trim(), v.trim())?;
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for LearnerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if self.seed != 0 {
            parts.push(format!("seed={}", self.seed));
        }
        if !parts.is_empty() {
            write!(f, ":{}", parts.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let s: LearnerSpec = "rf:trees=10,depth=10".parse().unwrap();
        assert_eq!(s.kind, LearnerKind::Rf);
        assert_eq!(s.get_usize("trees", 1, 1).unwrap(), 10);
        assert_eq!(s.to_string().parse::<LearnerSpec>().unwrap(), s);
        let k: LearnerSpec = "knn:k=5,seed=3".parse().unwrap();
        assert_eq!(k.seed, 3);
        assert_eq!("SVM".parse::<LearnerSpec>().unwrap().kind, LearnerKind::LinearSvm);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        assert!("knn:depth=3".parse::<LearnerSpec>().is_err());
        assert!("knn:k=0".parse::<LearnerSpec>().is_err());
        assert!("knn:k=abc".parse::<LearnerSpec>().is_err());
        assert!("linear-svm:lambda=-1".parse::<LearnerSpec>().is_err());
        assert!("wizard".parse::<LearnerSpec>().is_err());
        assert!("dt:depth".parse::<LearnerSpec>().is_err());
    }
}
