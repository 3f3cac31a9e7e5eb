//! Enumerable hypotheses and finite hypothesis classes.

use std::fmt;

use crate::distribution::FiniteDistribution;
use crate::error::{domain, Error, Result};
use crate::types::{Instance, Predictor, Schema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Greater,
    Less,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hypothesis {
    /// `1[x_feature > θ]` or `1[x_feature < θ]`.
    Threshold {
        theta: f64,
        direction: Direction,
        feature: usize,
    },
    /// `1[x ∈ members]`.
    SetIndicator { members: Vec<Instance> },
    /// Finite lookup table with values in `[0, 1]`, `default` elsewhere.
    Tabular {
        table: Vec<(Instance, f64)>,
        default: f64,
    },
    /// `1[w·x + b > 0]` over numeric features.
    Linear { weights: Vec<f64>, bias: f64 },
    Constant(f64),
}

impl Hypothesis {
    pub fn greater(theta: f64) -> Self {
        Hypothesis::Threshold {
            theta,
            direction: Direction::Greater,
            feature: 0,
        }
    }

    pub fn indicator(members: Vec<Instance>) -> Self {
        Hypothesis::SetIndicator { members }
    }

    pub fn tabular(table: Vec<(Instance, f64)>, default: f64) -> Result<Self> {
        let bad = table
            .iter()
            .map(|(_, v)| *v)
            .chain(std::iter::once(default))
            .find(|v| !(0.0..=1.0).contains(v));
        if let Some(v) = bad {
            return domain(format!("tabular value {v} outside [0, 1]"));
        }
        Ok(Hypothesis::Tabular { table, default })
    }

    fn compatible(&self, schema: Schema) -> bool {
        match self {
            Hypothesis::Threshold { feature, .. } => *feature < schema.numeric,
            Hypothesis::Linear { weights, .. } => weights.len() == schema.numeric,
            Hypothesis::SetIndicator { members } => members.iter().all(|m| m.schema() == schema),
            Hypothesis::Tabular { table, .. } => table.iter().all(|(m, _)| m.schema() == schema),
            Hypothesis::Constant(_) => true,
        }
    }
}

impl Predictor for Hypothesis {
    fn output(&self, x: &Instance) -> f64 {
        match self {
            Hypothesis::Threshold {
                theta,
                direction,
                feature,
            } => {
                let v = x.numeric[*feature];
                let fires = match direction {
                    Direction::Greater => v > *theta,
                    Direction::Less => v < *theta,
                };
                fires as u8 as f64
            }
            Hypothesis::SetIndicator { members } => {
                members.iter().any(|m| m.same_point(x)) as u8 as f64
            }
            Hypothesis::Tabular { table, default } => table
                .iter()
                .find(|(m, _)| m.same_point(x))
                .map_or(*default, |(_, v)| *v),
            Hypothesis::Linear { weights, bias } => {
                let s: f64 = weights.iter().zip(&x.numeric).map(|(w, v)| w * v).sum();
                (s + bias > 0.0) as u8 as f64
            }
            Hypothesis::Constant(c) => *c,
        }
    }

    fn input_schema(&self) -> Option<Schema> {
        match self {
            Hypothesis::Linear { weights, .. } => Some(Schema::new(weights.len(), 0)),
            _ => None,
        }
    }
}

fn fmt_instance(x: &Instance) -> String {
    let mut parts: Vec<String> = x.numeric.iter().map(|v| v.to_string()).collect();
    parts.extend(x.categorical.iter().map(|c| format!("#{c}")));
    if parts.len() == 1 {
        parts.remove(0)
    } else {
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::Threshold {
                theta,
                direction,
                feature,
            } => {
                let op = match direction {
                    Direction::Greater => '>',
                    Direction::Less => '<',
                };
                write!(f, "1[x{feature}{op}{theta}]")
            }
            Hypothesis::SetIndicator { members } => {
                let m: Vec<String> = members.iter().map(fmt_instance).collect();
                write!(f, "1[x∈{{{}}}]", m.join(","))
            }
            Hypothesis::Tabular { table, default } => {
                let m: Vec<String> = table
                    .iter()
                    .map(|(x, v)| format!("{}→{v}", fmt_instance(x)))
                    .collect();
                write!(f, "tab[{}; else {default}]", m.join(","))
            }
            Hypothesis::Linear { weights, bias } => {
                let w: Vec<String> = weights.iter().map(|v| format!("{v:.4}")).collect();
                write!(f, "1[({})·x+{bias:.4}>0]", w.join(","))
            }
            Hypothesis::Constant(c) => write!(f, "const {c}"),
        }
    }
}

/// Nonempty, schema-compatible list of hypotheses.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteHypothesisClass {
    hypotheses: Vec<Hypothesis>,
}

impl FiniteHypothesisClass {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return domain("empty hypothesis class");
        }
        Ok(Self { hypotheses })
    }

    pub fn get(&self, i: usize) -> &Hypothesis {
        &self.hypotheses[i]
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    pub fn check_schema(&self, schema: Schema) -> Result<()> {
        match self.hypotheses.iter().find(|h| !h.compatible(schema)) {
            Some(h) => Err(Error::Schema {
                expected: schema.to_string(),
                found: format!("hypothesis {h}"),
            }),
            None => Ok(()),
        }
    }

    /// `1[x_feature > θ]` for each given θ.
    pub fn thresholds(feature: usize, thetas: &[f64]) -> Result<Self> {
        Self::new(
            thetas
                .iter()
                .map(|&theta| Hypothesis::Threshold {
                    theta,
                    direction: Direction::Greater,
                    feature,
                })
                .collect(),
        )
    }

    /// Threshold grid that realizes every loss an upward threshold can attain
    /// on point masses: midpoints between adjacent coordinates plus one
    /// sentinel below and above.
    pub fn threshold_grid(feature: usize, dists: &[&FiniteDistribution]) -> Result<Self> {
        let mut coords: Vec<f64> = dists
            .iter()
            .flat_map(|d| d.atoms().iter())
            .map(|a| {
                a.instance
                    .numeric
                    .get(feature)
                    .copied()
                    .ok_or_else(|| Error::Domain(format!("no numeric feature {feature}")))
            })
            .collect::<Result<_>>()?;
        coords.sort_by(f64::total_cmp);
        coords.dedup();
        Self::thresholds(feature, &grid_from_coords(&coords))
    }

    /// Linear separators in the plane: unit normals at `angles` evenly
    /// spaced directions combined with every offset.
    pub fn linear_grid(angles: usize, offsets: &[f64]) -> Result<Self> {
        let mut hs = Vec::with_capacity(angles * offsets.len());
        for k in 0..angles {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / angles as f64;
            let (s, c) = phi.sin_cos();
            // Snap near-zero components so axis-aligned separators are exact.
            let snap = |v: f64| if v.abs() < 1e-12 { 0.0 } else { v };
            for &b in offsets {
                hs.push(Hypothesis::Linear {
                    weights: vec![snap(c), snap(s)],
                    bias: b,
                });
            }
        }
        Self::new(hs)
    }
}

pub(crate) fn grid_from_coords(coords: &[f64]) -> Vec<f64> {
    let (Some(&lo), Some(&hi)) = (coords.first(), coords.last()) else {
        return Vec::new();
    };
    let mut thetas = vec![lo - 1.0];
    thetas.extend(coords.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    thetas.push(hi + 1.0);
    thetas
}
