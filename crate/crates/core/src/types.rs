//! Instances, labels, schemas and losses.

use std::fmt;

use crate::error::{Error, Result};

/// Number of numeric and categorical features an instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Schema {
    pub numeric: usize,
    pub categorical: usize,
}

impl Schema {
    pub fn new(numeric: usize, categorical: usize) -> Self {
        Self {
            numeric,
            categorical,
        }
    }

    pub fn width(&self) -> usize {
        self.numeric + self.categorical
    }

    pub fn check(&self, x: &Instance) -> Result<()> {
        let found = x.schema();
        if found == *self {
            Ok(())
        } else {
            Err(Error::Schema {
                expected: self.to_string(),
                found: found.to_string(),
            })
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} numeric + {} categorical", self.numeric, self.categorical)
    }
}

/// A point of the data space: real features followed by category indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Instance {
    pub numeric: Vec<f64>,
    pub categorical: Vec<u32>,
}

impl Instance {
    /// Builds a numeric-only instance. Non-finite values are rejected.
    pub fn numeric(values: impl Into<Vec<f64>>) -> Result<Self> {
        Self::new(values.into(), Vec::new())
    }

    pub fn new(numeric: Vec<f64>, categorical: Vec<u32>) -> Result<Self> {
        if let Some(v) = numeric.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite feature value {v}")));
        }
        Ok(Self {
            numeric,
            categorical,
        })
    }

    /// Numeric-only instance from trusted finite values.
    pub(crate) fn from_numeric(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self {
            numeric: values,
            categorical: Vec::new(),
        }
    }

    pub fn schema(&self) -> Schema {
        Schema::new(self.numeric.len(), self.categorical.len())
    }

    /// Exact equality including bitwise-equal reals; used for atom merging.
    pub fn same_point(&self, other: &Instance) -> bool {
        self.categorical == other.categorical
            && self.numeric.len() == other.numeric.len()
            && self
                .numeric
                .iter()
                .zip(&other.numeric)
                .all(|(a, b)| a.to_bits() == b.to_bits() || a == b)
    }

    /// Total-order key used to canonicalize distributions.
    pub(crate) fn cmp_key(&self, other: &Instance) -> std::cmp::Ordering {
        let n = self
            .numeric
            .iter()
            .zip(&other.numeric)
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne());
        n.unwrap_or_else(|| self.numeric.len().cmp(&other.numeric.len()))
            .then_with(|| self.categorical.cmp(&other.categorical))
    }
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Label(u8);

impl Label {
    pub const ZERO: Label = Label(0);
    pub const ONE: Label = Label(1);

    pub fn new(value: u8) -> Result<Self> {
        match value {
            0 | 1 => Ok(Label(value)),
            v => Err(Error::Domain(format!("label {v} is not binary"))),
        }
    }

    pub fn from_bool(b: bool) -> Self {
        Label(b as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    pub fn is_one(self) -> bool {
        self.0 == 1
    }

    pub fn flipped(self) -> Self {
        Label(1 - self.0)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Pointwise loss of a prediction in `[0, 1]` against a binary label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossFunction {
    ZeroOne,
    Mse,
}

impl LossFunction {
    pub fn eval(self, prediction: f64, y: Label) -> f64 {
        match self {
            LossFunction::ZeroOne => {
                if prediction == y.as_f64() {
                    0.0
                } else {
                    1.0
                }
            }
            LossFunction::Mse => {
                let d = prediction - y.as_f64();
                d * d
            }
        }
    }
}

impl std::str::FromStr for LossFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero-one" | "01" | "0-1" => Ok(LossFunction::ZeroOne),
            "mse" => Ok(LossFunction::Mse),
            other => Err(Error::Config(format!("unknown loss `{other}`"))),
        }
    }
}

/// Anything that maps an instance to a value in `[0, 1]`.
///
/// Classifiers return their hard label as `0.0`/`1.0`; probabilistic
/// models may return any value in the unit interval.
pub trait Predictor {
    fn output(&self, x: &Instance) -> f64;

    /// Input schema this predictor was built for, if it constrains one.
    fn input_schema(&self) -> Option<Schema> {
        None
    }
}

impl<P: Predictor + ?Sized> Predictor for &P {
    fn output(&self, x: &Instance) -> f64 {
        (**self).output(x)
    }

    fn input_schema(&self) -> Option<Schema> {
        (**self).input_schema()
    }
}

/// Predictor backed by a closure; handy for ad-hoc models in tests and demos.
pub struct FnPredictor<F>(pub F);

impl<F: Fn(&Instance) -> f64> Predictor for FnPredictor<F> {
    fn output(&self, x: &Instance) -> f64 {
        (self.0)(x)
    }
}
