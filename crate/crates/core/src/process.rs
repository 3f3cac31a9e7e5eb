//! Finite drift processes: a distribution over time points together with a
//! data distribution per time point.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::distribution::{Atom, FiniteDistribution};
use crate::error::{domain, Error, Result};
use crate::types::{Instance, Label, Schema};

/// Mass tolerance accepted when reading hand-written process files.
const FILE_MASS_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TimePoint {
    pub probability: f64,
    pub dist: FiniteDistribution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftProcess {
    timepoints: Vec<TimePoint>,
}

impl DriftProcess {
    pub fn new(timepoints: Vec<TimePoint>) -> Result<Self> {
        let first = timepoints
            .first()
            .ok_or_else(|| Error::Domain("drift process without time points".into()))?;
        let schema = first.dist.schema();
        for (t, tp) in timepoints.iter().enumerate() {
            if !(tp.probability > 0.0) || !tp.probability.is_finite() {
                return domain(format!("time point {t} has probability {}", tp.probability));
            }
            if tp.dist.schema() != schema {
                return Err(Error::Schema {
                    expected: schema.to_string(),
                    found: tp.dist.schema().to_string(),
                });
            }
        }
        let total: f64 = timepoints.iter().map(|t| t.probability).sum();
        if (total - 1.0).abs() > 1e-9 {
            return domain(format!("time probabilities sum to {total}"));
        }
        Ok(Self { timepoints })
    }

    /// Time points with equal probability.
    pub fn uniform(dists: Vec<FiniteDistribution>) -> Result<Self> {
        let p = 1.0 / dists.len() as f64;
        Self::new(
            dists
                .into_iter()
                .map(|dist| TimePoint {
                    probability: p,
                    dist,
                })
                .collect(),
        )
    }

    pub fn timepoints(&self) -> &[TimePoint] {
        &self.timepoints
    }

    pub fn len(&self) -> usize {
        self.timepoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timepoints.is_empty()
    }

    pub fn schema(&self) -> Schema {
        self.timepoints[0].dist.schema()
    }

    /// Every distinct instance appearing at any time point.
    pub fn domain(&self) -> Vec<Instance> {
        let all: Vec<Atom> = self
            .timepoints
            .iter()
            .flat_map(|t| t.dist.atoms().iter().cloned())
            .map(|mut a| {
                a.weight = 1.0;
                a
            })
            .collect();
        FiniteDistribution::normalized(all)
            .map(|d| d.support())
            .unwrap_or_default()
    }

    /// Serializes to the line format
    /// `t=<idx> p_t=<real> w=<real> x=<values> y=<0|1>`.
    ///
    /// Categorical features, when present, are appended as `c=<indices>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, tp) in self.timepoints.iter().enumerate() {
            for a in tp.dist.atoms() {
                let xs: Vec<String> = a.instance.numeric.iter().map(|v| v.to_string()).collect();
                let _ = write!(
                    out,
                    "t={t} p_t={} w={} x={} y={}",
                    tp.probability,
                    a.weight,
                    xs.join(","),
                    a.label
                );
                if !a.instance.categorical.is_empty() {
                    let cs: Vec<String> =
                        a.instance.categorical.iter().map(|v| v.to_string()).collect();
                    let _ = write!(out, " c={}", cs.join(","));
                }
                out.push('\n');
            }
        }
        out
    }

    /// Parses the line format written by [`DriftProcess::to_text`]. Blank
    /// lines and `#` comments are skipped; time indices must be contiguous
    /// from zero.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut groups: Vec<(f64, Vec<Atom>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let (mut t, mut p, mut w, mut xs, mut y, mut cs) = (None, None, None, None, None, None);
            for field in line.split_whitespace() {
                let (key, value) = field
                    .split_once('=')
                    .ok_or_else(|| perr(format!("field `{field}` lacks `=`")))?;
                match key {
                    "t" => t = Some(value.parse::<usize>().map_err(|e| perr(e.to_string()))?),
                    "p_t" => p = Some(value.parse::<f64>().map_err(|e| perr(e.to_string()))?),
                    "w" => w = Some(value.parse::<f64>().map_err(|e| perr(e.to_string()))?),
                    "x" => {
                        let vals: std::result::Result<Vec<f64>, _> = if value.is_empty() {
                            Ok(Vec::new())
                        } else {
                            value.split(',').map(str::parse::<f64>).collect()
                        };
                        xs = Some(vals.map_err(|e| perr(e.to_string()))?);
                    }
                    "c" => {
                        let vals: std::result::Result<Vec<u32>, _> =
                            value.split(',').map(str::parse::<u32>).collect();
                        cs = Some(vals.map_err(|e| perr(e.to_string()))?);
                    }
                    "y" => {
                        let v = value.parse::<u8>().map_err(|e| perr(e.to_string()))?;
                        y = Some(Label::new(v).map_err(|e| perr(e.to_string()))?);
                    }
                    other => return Err(perr(format!("unknown field `{other}`"))),
                }
            }
            let missing = |name: &str| perr(format!("missing field `{name}`"));
            let t = t.ok_or_else(|| missing("t"))?;
            let p = p.ok_or_else(|| missing("p_t"))?;
            let w = w.ok_or_else(|| missing("w"))?;
            let xs = xs.ok_or_else(|| missing("x"))?;
            let y = y.ok_or_else(|| missing("y"))?;
            let instance =
                Instance::new(xs, cs.unwrap_or_default()).map_err(|e| perr(e.to_string()))?;
            if t > groups.len() {
                return Err(perr(format!("time index {t} skips {}", groups.len())));
            }
            if t == groups.len() {
                groups.push((p, Vec::new()));
            } else if (groups[t].0 - p).abs() > 1e-12 {
                return Err(perr(format!("inconsistent p_t for time point {t}")));
            }
            groups[t].1.push(Atom::new(w, instance, y));
        }
        let timepoints = groups
            .into_iter()
            .enumerate()
            .map(|(t, (probability, atoms))| {
                let mass: f64 = atoms.iter().map(|a| a.weight).sum();
                if (mass - 1.0).abs() > FILE_MASS_TOLERANCE {
                    return domain(format!("time point {t} has atom mass {mass}"));
                }
                Ok(TimePoint {
                    probability,
                    dist: FiniteDistribution::normalized(atoms)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = timepoints.iter().map(|t| t.probability).sum();
        if (total - 1.0).abs() > FILE_MASS_TOLERANCE {
            return domain(format!("time probabilities sum to {total}"));
        }
        let timepoints = timepoints
            .into_iter()
            .map(|t| TimePoint {
                probability: t.probability / total,
                ..t
            })
            .collect();
        Self::new(timepoints)
    }
}

/// A nonempty set of time point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TimeWindow(BTreeSet<usize>);

impl TimeWindow {
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if set.is_empty() {
            return domain("empty time window");
        }
        Ok(Self(set))
    }

    pub fn single(t: usize) -> Self {
        Self(BTreeSet::from([t]))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn validate(&self, process: &DriftProcess) -> Result<()> {
        match self.0.iter().next_back() {
            Some(&max) if max >= process.len() => domain(format!(
                "window index {max} out of range for {} time points",
                process.len()
            )),
            _ => Ok(()),
        }
    }

    /// `P(t | T ∈ W)` for each member time point.
    pub fn conditional_weights(&self, process: &DriftProcess) -> Result<Vec<(usize, f64)>> {
        self.validate(process)?;
        let mass: f64 = self
            .indices()
            .map(|t| process.timepoints[t].probability)
            .sum();
        Ok(self
            .indices()
            .map(|t| (t, process.timepoints[t].probability / mass))
            .collect())
    }
}

impl std::fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `D_W = E[D_T | T ∈ W]`, canonicalized by atom merging.
pub fn mean_distribution(process: &DriftProcess, w: &TimeWindow) -> Result<FiniteDistribution> {
    let weights = w.conditional_weights(process)?;
    let parts: Vec<(f64, &FiniteDistribution)> = weights
        .iter()
        .map(|&(t, p)| (p, &process.timepoints[t].dist))
        .collect();
    FiniteDistribution::mixture(&parts)
}

/// True iff two time points' distributions differ in total variation by
/// more than `tol`.
pub fn has_distribution_drift(process: &DriftProcess, tol: f64) -> bool {
    let tps = process.timepoints();
    (0..tps.len()).any(|i| {
        (i + 1..tps.len()).any(|j| tps[i].dist.total_variation(&tps[j].dist) > tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(v: f64) -> Instance {
        Instance::from_numeric(vec![v])
    }

    fn dirac(v: f64, y: u8) -> FiniteDistribution {
        FiniteDistribution::dirac(x(v), Label::new(y).unwrap())
    }

    fn assert_atoms(d: &FiniteDistribution, expected: &[(f64, f64, u8)]) {
        assert_eq!(d.len(), expected.len());
        for (a, (w, v, y)) in d.atoms().iter().zip(expected) {
            assert!((a.weight - w).abs() < 1e-12);
            assert_eq!(a.instance, x(*v));
            assert_eq!(a.label.value(), *y);
        }
    }

    #[test]
    fn single_timepoint_window_is_identity() {
        let d = FiniteDistribution::new(vec![
            Atom::new(0.75, x(2.0), Label::ONE),
            Atom::new(0.25, x(-1.0), Label::ZERO),
        ])
        .unwrap();
        let p = DriftProcess::uniform(vec![d.clone()]).unwrap();
        let m = mean_distribution(&p, &TimeWindow::single(0)).unwrap();
        assert_eq!(m, d.merged());
    }

    #[test]
    fn symmetric_and_weighted_mixtures() {
        let p = DriftProcess::uniform(vec![dirac(0.0, 0), dirac(1.0, 1)]).unwrap();
        let w = TimeWindow::new([0, 1]).unwrap();
        assert_atoms(&mean_distribution(&p, &w).unwrap(), &[(0.5, 0.0, 0), (0.5, 1.0, 1)]);

        let p = DriftProcess::new(vec![
            TimePoint {
                probability: 0.25,
                dist: dirac(0.0, 0),
            },
            TimePoint {
                probability: 0.75,
                dist: dirac(1.0, 1),
            },
        ])
        .unwrap();
        assert_atoms(&mean_distribution(&p, &w).unwrap(), &[(0.25, 0.0, 0), (0.75, 1.0, 1)]);
    }

    #[test]
    fn out_of_range_window_is_domain_error() {
        let p = DriftProcess::uniform(vec![dirac(0.0, 0)]).unwrap();
        let w = TimeWindow::new([0, 3]).unwrap();
        assert!(matches!(mean_distribution(&p, &w), Err(Error::Domain(_))));
        assert!(TimeWindow::new([]).is_err());
    }

    #[test]
    fn zero_mass_timepoints_rejected() {
        let r = DriftProcess::new(vec![
            TimePoint {
                probability: 1.0,
                dist: dirac(0.0, 0),
            },
            TimePoint {
                probability: 0.0,
                dist: dirac(1.0, 1),
            },
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn distribution_drift_detection() {
        let same = DriftProcess::uniform(vec![dirac(0.0, 0), dirac(0.0, 0)]).unwrap();
        assert!(!has_distribution_drift(&same, 1e-9));
        let a = FiniteDistribution::new(vec![
            Atom::new(0.5, x(0.0), Label::ZERO),
            Atom::new(0.5, x(1.0), Label::ONE),
        ])
        .unwrap();
        let b = FiniteDistribution::new(vec![
            Atom::new(0.5, x(1.0), Label::ONE),
            Atom::new(0.5, x(0.0), Label::ZERO),
        ])
        .unwrap();
        let reordered = DriftProcess::uniform(vec![a.clone(), b]).unwrap();
        assert!(!has_distribution_drift(&reordered, 1e-9));
        let drifting = DriftProcess::uniform(vec![a, dirac(0.0, 0)]).unwrap();
        assert!(has_distribution_drift(&drifting, 1e-9));
    }

    #[test]
    fn text_format_round_trip() {
        let d = FiniteDistribution::new(vec![
            Atom::new(1.0 / 3.0, Instance::from_numeric(vec![-1.0, 0.5]), Label::ZERO),
            Atom::new(2.0 / 3.0, Instance::from_numeric(vec![1.0, 2.0]), Label::ONE),
        ])
        .unwrap();
        let p = DriftProcess::uniform(vec![d.clone(), d]).unwrap();
        let text = p.to_text();
        assert!(text.starts_with("t=0 p_t=0.5 w=0.3333333333333333 x=-1,0.5 y=0\n"));
        assert_eq!(DriftProcess::from_text(&text).unwrap(), p);
    }

    #[test]
    fn text_format_errors_name_the_line() {
        let err = DriftProcess::from_text("t=0 p_t=1 w=1 x=0 y=0\nt=0 p_t=1 w=1 x=a y=1\n")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = DriftProcess::from_text("t=1 p_t=1 w=1 x=0 y=0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = DriftProcess::from_text("t=0 p_t=1 w=1 x=0 y=2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }
}
