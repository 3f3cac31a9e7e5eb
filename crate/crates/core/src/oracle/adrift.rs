//! Monte-Carlo estimation of A-model drift for learners over a finite class.
//!
//! Samples are represented by atom counts so that thousands of trials stay
//! cheap; every trained model is scored with its exact expected loss.

use rayon::prelude::*;

use crate::distribution::FiniteDistribution;
use crate::error::Result;
use crate::process::{DriftProcess, TimeWindow};
use crate::rng;
use crate::types::{Instance, Label, LossFunction};

use super::hypothesis::FiniteHypothesisClass;
use super::notions::WindowLosses;

/// An i.i.d. sample stored as counts over the atoms of its distribution.
#[derive(Debug)]
pub struct CountSample<'a> {
    pub window: &'a WindowLosses,
    pub atom_losses: &'a [Vec<f64>],
    pub counts: Vec<usize>,
    pub n: usize,
}

impl CountSample<'_> {
    pub fn dist(&self) -> &FiniteDistribution {
        &self.window.dist
    }

    pub fn contains(&self, x: &Instance, y: Label) -> bool {
        self.dist()
            .atoms()
            .iter()
            .zip(&self.counts)
            .any(|(a, &c)| c > 0 && a.label == y && a.instance.same_point(x))
    }

    /// Empirical loss of hypothesis `h`.
    pub fn empirical_loss(&self, h: usize) -> f64 {
        let total: f64 = self.atom_losses[h]
            .iter()
            .zip(&self.counts)
            .map(|(l, &c)| l * c as f64)
            .sum();
        total / self.n as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LearnerFailure(pub String);

/// A training algorithm that selects one hypothesis of a finite class.
pub trait ClassLearner: Sync {
    fn select(&self, class: &FiniteHypothesisClass, sample: &CountSample<'_>) -> Result<usize, LearnerFailure>;

    fn name(&self) -> String;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Lowest,
    Highest,
}

/// Empirical risk minimization; consistent on finite classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Erm {
    pub ties: TieBreak,
}

impl Erm {
    pub const LOWEST: Erm = Erm {
        ties: TieBreak::Lowest,
    };
    pub const HIGHEST: Erm = Erm {
        ties: TieBreak::Highest,
    };
}

impl ClassLearner for Erm {
    fn select(&self, class: &FiniteHypothesisClass, sample: &CountSample<'_>) -> Result<usize, LearnerFailure> {
        let mut best = (f64::INFINITY, 0);
        for h in 0..class.len() {
            let l = sample.empirical_loss(h);
            let better = match self.ties {
                TieBreak::Lowest => l < best.0,
                TieBreak::Highest => l <= best.0,
            };
            if better {
                best = (l, h);
            }
        }
        Ok(best.1)
    }

    fn name(&self) -> String {
        match self.ties {
            TieBreak::Lowest => "erm-lowest".into(),
            TieBreak::Highest => "erm-highest".into(),
        }
    }
}

/// Ignores the data and always returns the same hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedChoice(pub usize);

impl ClassLearner for FixedChoice {
    fn select(&self, class: &FiniteHypothesisClass, _: &CountSample<'_>) -> Result<usize, LearnerFailure> {
        if self.0 < class.len() {
            Ok(self.0)
        } else {
            Err(LearnerFailure(format!("index {} outside class", self.0)))
        }
    }

    fn name(&self) -> String {
        format!("fixed-{}", self.0)
    }
}

/// Chooses `if_present` when the sample contains `(x, y)`, else `if_absent`.
#[derive(Debug, Clone, PartialEq)]
pub struct PresenceSwitch {
    pub point: (Instance, Label),
    pub if_present: usize,
    pub if_absent: usize,
}

impl ClassLearner for PresenceSwitch {
    fn select(&self, _: &FiniteHypothesisClass, sample: &CountSample<'_>) -> Result<usize, LearnerFailure> {
        Ok(if sample.contains(&self.point.0, self.point.1) {
            self.if_present
        } else {
            self.if_absent
        })
    }

    fn name(&self) -> String {
        "presence-switch".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McParams {
    pub n1: usize,
    pub n2: usize,
    pub trials: usize,
    pub seed: u64,
    /// Estimate at or above which A-drift is declared present.
    pub present_at: f64,
    /// Estimate at or below which A-drift is declared absent.
    pub absent_at: f64,
}

impl Default for McParams {
    fn default() -> Self {
        Self {
            n1: 2000,
            n2: 2000,
            trials: 200,
            seed: 0,
            present_at: 0.95,
            absent_at: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum McVerdict {
    Present,
    Absent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ADriftEstimate {
    /// Frequency of `L_{W2}(A(S1)) > L_{W2}(A(S2)) + C` over valid trials.
    pub probability: f64,
    pub events: usize,
    pub valid_trials: usize,
    pub failed_trials: usize,
}

impl ADriftEstimate {
    pub fn verdict(&self, params: &McParams) -> McVerdict {
        if self.valid_trials == 0 {
            McVerdict::Inconclusive
        } else if self.probability >= params.present_at {
            McVerdict::Present
        } else if self.probability <= params.absent_at {
            McVerdict::Absent
        } else {
            McVerdict::Inconclusive
        }
    }
}

fn atom_loss_matrix(class: &FiniteHypothesisClass, w: &WindowLosses, loss: LossFunction) -> Vec<Vec<f64>> {
    use crate::types::Predictor;
    class
        .hypotheses()
        .iter()
        .map(|h| {
            w.dist
                .atoms()
                .iter()
                .map(|a| loss.eval(h.output(&a.instance), a.label))
                .collect()
        })
        .collect()
}

/// Estimates `P[L_{W2}(A(S1)) > L_{W2}(A(S2)) + c]` over independent pairs
/// `S1 ~ D_{W1}^{n1}`, `S2 ~ D_{W2}^{n2}`.
#[allow(clippy::too_many_arguments)]
pub fn check_a_drift_mc(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    learner: &dyn ClassLearner,
    loss: LossFunction,
    w1: &TimeWindow,
    w2: &TimeWindow,
    c: f64,
    params: &McParams,
) -> Result<ADriftEstimate> {
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    a_drift_between(class, learner, loss, &a, &b, c, params)
}

/// [`check_a_drift_mc`] on precomputed window losses.
pub fn a_drift_between(
    class: &FiniteHypothesisClass,
    learner: &dyn ClassLearner,
    loss: LossFunction,
    a: &WindowLosses,
    b: &WindowLosses,
    c: f64,
    params: &McParams,
) -> Result<ADriftEstimate> {
    if params.n1 == 0 || params.n2 == 0 || params.trials == 0 {
        return crate::error::domain("sample sizes and trial count must be positive");
    }
    let ma = atom_loss_matrix(class, a, loss);
    let mb = atom_loss_matrix(class, b, loss);
    let outcomes: Vec<Option<bool>> = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let s1 = CountSample {
                window: a,
                atom_losses: &ma,
                counts: a.dist.draw_counts(params.n1, rng::derive(params.seed, 2 * trial as u64)),
                n: params.n1,
            };
            let s2 = CountSample {
                window: b,
                atom_losses: &mb,
                counts: b
                    .dist
                    .draw_counts(params.n2, rng::derive(params.seed, 2 * trial as u64 + 1)),
                n: params.n2,
            };
            let h1 = learner.select(class, &s1).ok()?;
            let h2 = learner.select(class, &s2).ok()?;
            Some(b.losses[h1] > b.losses[h2] + c)
        })
        .collect();
    let valid_trials = outcomes.iter().filter(|o| o.is_some()).count();
    let events = outcomes.iter().filter(|o| **o == Some(true)).count();
    Ok(ADriftEstimate {
        probability: if valid_trials == 0 {
            0.0
        } else {
            events as f64 / valid_trials as f64
        },
        events,
        valid_trials,
        failed_trials: params.trials - valid_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Atom;

    fn x(v: f64) -> Instance {
        Instance::from_numeric(vec![v])
    }

    #[test]
    fn no_drift_erm_rarely_fires() {
        let d = FiniteDistribution::new(vec![
            Atom::new(0.5, x(0.0), Label::ZERO),
            Atom::new(0.25, x(1.0), Label::ONE),
            Atom::new(0.25, x(1.0), Label::ZERO),
        ])
        .unwrap();
        let p = DriftProcess::uniform(vec![d.clone(), d.clone()]).unwrap();
        let class = FiniteHypothesisClass::threshold_grid(0, &[&d]).unwrap();
        let params = McParams {
            seed: 3,
            ..McParams::default()
        };
        let est = check_a_drift_mc(
            &p,
            &class,
            &Erm::LOWEST,
            LossFunction::ZeroOne,
            &TimeWindow::single(0),
            &TimeWindow::single(1),
            0.05,
            &params,
        )
        .unwrap();
        assert!(est.probability <= 0.05, "{est:?}");
        assert_eq!(est.verdict(&params), McVerdict::Absent);
    }

    #[test]
    fn failing_learner_counts_trial_errors() {
        let d = FiniteDistribution::dirac(x(0.0), Label::ZERO);
        let p = DriftProcess::uniform(vec![d.clone(), d]).unwrap();
        let class = FiniteHypothesisClass::thresholds(0, &[0.5]).unwrap();
        let params = McParams {
            trials: 10,
            n1: 5,
            n2: 5,
            ..McParams::default()
        };
        let est = check_a_drift_mc(
            &p,
            &class,
            &FixedChoice(4),
            LossFunction::ZeroOne,
            &TimeWindow::single(0),
            &TimeWindow::single(1),
            0.1,
            &params,
        )
        .unwrap();
        assert_eq!(est.failed_trials, 10);
        assert_eq!(est.verdict(&params), McVerdict::Inconclusive);
    }

    #[test]
    fn erm_tie_breaking() {
        let d = FiniteDistribution::dirac(x(0.0), Label::ZERO);
        let p = DriftProcess::uniform(vec![d]).unwrap();
        let class = FiniteHypothesisClass::thresholds(0, &[0.5, 1.0, 2.0]).unwrap();
        let w = WindowLosses::for_window(&p, &class, LossFunction::ZeroOne, &TimeWindow::single(0)).unwrap();
        let m = atom_loss_matrix(&class, &w, LossFunction::ZeroOne);
        let s = CountSample {
            window: &w,
            atom_losses: &m,
            counts: vec![3],
            n: 3,
        };
        assert_eq!(Erm::LOWEST.select(&class, &s).unwrap(), 0);
        assert_eq!(Erm::HIGHEST.select(&class, &s).unwrap(), 2);
    }
}
