//! Executable counterexample constructions with their expected verdicts.
//!
//! Two constructions are corrected where the printed text contradicts its
//! own conclusion: CE1 uses `1[x = 2]` as second hypothesis (so both models
//! have zero loss at the first time point) and CE3 swaps the two branches of
//! the data-dependent learner (so the learner trained on the first window
//! ends up with loss 1/3, not 0, on the second).

use rand::Rng;

use crate::distribution::{Atom, FiniteDistribution, Provenance, Sample};
use crate::error::{Error, Result};
use crate::process::{DriftProcess, TimeWindow};
use crate::rng;
use crate::types::{Instance, Label, LossFunction};

use super::adrift::{check_a_drift_mc, ADriftEstimate, ClassLearner, Erm, FixedChoice, McParams, McVerdict, PresenceSwitch};
use super::hypothesis::{FiniteHypothesisClass, Hypothesis};
use super::notions::{analyze, has_real_drift, DriftReport, LossRelation, WindowLosses};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FixtureId {
    /// Weak without strong H-model drift.
    Ce1,
    /// Strong H-model drift; cross losses `(1 − δ_ij)/3`; consistent ERM.
    Ce2,
    /// A-model drift without weak H-model drift for an inconsistent learner.
    Ce3,
    /// The CE2 distributions with the constant learner `S ↦ h₂`: no A-drift.
    Ce4,
    /// ℓ-model drift under increasing optimal loss, no weak drift.
    Ell1,
    /// Weak drift under decreasing optimal loss, no ℓ-model drift.
    Ell2,
    /// Virtual-only XOR halves against a linear class.
    Xor,
}

impl FixtureId {
    pub const ALL: [FixtureId; 7] = [
        FixtureId::Ce1,
        FixtureId::Ce2,
        FixtureId::Ce3,
        FixtureId::Ce4,
        FixtureId::Ell1,
        FixtureId::Ell2,
        FixtureId::Xor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureId::Ce1 => "CE1",
            FixtureId::Ce2 => "CE2",
            FixtureId::Ce3 => "CE3",
            FixtureId::Ce4 => "CE4",
            FixtureId::Ell1 => "ELL1",
            FixtureId::Ell2 => "ELL2",
            FixtureId::Xor => "XOR",
        }
    }
}

impl std::fmt::Display for FixtureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for FixtureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FixtureId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown fixture `{s}`")))
    }
}

/// Verdicts a fixture must reproduce; `None` fields are not asserted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpectedReport {
    pub strong_h: Option<bool>,
    pub c_s: Option<f64>,
    pub weak_12: Option<bool>,
    pub weak_21: Option<bool>,
    pub ell_12: Option<bool>,
    pub ell_12_increase: Option<f64>,
    pub relation: Option<LossRelation>,
    pub discrepancy: Option<f64>,
    pub real_drift: Option<bool>,
    pub a_drift: Option<McVerdict>,
    /// `(hypothesis index, L_{W1}, L_{W2})` triples.
    pub losses: Vec<(usize, f64, f64)>,
}

pub struct Fixture {
    pub id: FixtureId,
    pub process: DriftProcess,
    pub class: FiniteHypothesisClass,
    pub loss: LossFunction,
    pub w1: TimeWindow,
    pub w2: TimeWindow,
    pub expected: ExpectedReport,
    pub learner: Option<Box<dyn ClassLearner + Send>>,
    pub learner_consistent: bool,
    /// Margin used for the A-drift event.
    pub a_drift_c: f64,
}

#[derive(Debug, Clone)]
pub struct FixtureOutcome {
    pub report: DriftReport,
    pub real_drift: bool,
    pub a_drift: Option<ADriftEstimate>,
    pub losses: Vec<(usize, f64, f64)>,
    pub mismatches: Vec<String>,
}

impl FixtureOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn x(v: f64) -> Instance {
    Instance::from_numeric(vec![v])
}

fn dist(spec: &[(f64, f64, u8)]) -> FiniteDistribution {
    FiniteDistribution::normalized(
        spec.iter()
            .map(|&(w, v, y)| Atom::new(w, x(v), Label::from_bool(y == 1)))
            .collect(),
    )
    .expect("fixture distributions are valid")
}

fn windows() -> (TimeWindow, TimeWindow) {
    (TimeWindow::single(0), TimeWindow::single(1))
}

const THIRD: f64 = 1.0 / 3.0;

fn ce2_dists() -> Vec<FiniteDistribution> {
    vec![
        dist(&[(THIRD, -1.0, 0), (THIRD, 0.0, 0), (THIRD, 1.0, 1)]),
        dist(&[(THIRD, -1.0, 0), (THIRD, 0.0, 1), (THIRD, 1.0, 1)]),
    ]
}

/// Builds a fixture with its exact distributions, class and expectations.
pub fn make_fixture(id: FixtureId) -> Fixture {
    let (w1, w2) = windows();
    let zero_one = LossFunction::ZeroOne;
    let base = |process, class, expected| Fixture {
        id,
        process,
        class,
        loss: zero_one,
        w1: w1.clone(),
        w2: w2.clone(),
        expected,
        learner: None,
        learner_consistent: true,
        a_drift_c: 1.0 / 9.0,
    };
    match id {
        FixtureId::Ce1 => {
            let process = DriftProcess::uniform(vec![
                dist(&[(0.5, 1.0, 0), (0.5, 2.0, 1)]),
                dist(&[(THIRD, 1.0, 0), (THIRD, 2.0, 1), (THIRD, 3.0, 1)]),
            ])
            .unwrap();
            // 1[x ≥ 2] on the integer data space {1, 2, 3}
            let class = FiniteHypothesisClass::new(vec![
                Hypothesis::greater(1.5),
                Hypothesis::indicator(vec![x(2.0)]),
            ])
            .unwrap();
            base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(false),
                    c_s: Some(0.0),
                    weak_12: Some(true),
                    weak_21: Some(false),
                    real_drift: Some(false),
                    losses: vec![(0, 0.0, 0.0), (1, 0.0, THIRD)],
                    ..Default::default()
                },
            )
        }
        FixtureId::Ce2 | FixtureId::Ce4 => {
            let process = DriftProcess::uniform(ce2_dists()).unwrap();
            let class = FiniteHypothesisClass::thresholds(0, &[-1.0, -0.5, 0.0, 0.5]).unwrap();
            let consistent = id == FixtureId::Ce2;
            let mut f = base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(true),
                    c_s: Some(1.0 / 9.0),
                    weak_12: Some(true),
                    weak_21: Some(true),
                    ell_12: Some(true),
                    ell_12_increase: Some(THIRD),
                    relation: Some(LossRelation::Constant),
                    discrepancy: Some(THIRD),
                    real_drift: Some(true),
                    a_drift: Some(if consistent {
                        McVerdict::Present
                    } else {
                        McVerdict::Absent
                    }),
                    // h₁ = 1[x > 0] optimal on D₁, h₂ = 1[x > −1] optimal on D₂
                    losses: vec![(2, 0.0, THIRD), (0, THIRD, 0.0)],
                    ..Default::default()
                },
            );
            f.learner = Some(if consistent {
                Box::new(Erm::LOWEST)
            } else {
                Box::new(FixedChoice(0))
            });
            f.learner_consistent = consistent;
            f
        }
        FixtureId::Ce3 => {
            let process = DriftProcess::uniform(vec![
                dist(&[(0.5, -1.0, 0), (0.5, 0.0, 1)]),
                dist(&[(THIRD, -1.0, 0), (THIRD, 0.0, 1), (THIRD, 1.0, 1)]),
            ])
            .unwrap();
            let class = FiniteHypothesisClass::thresholds(0, &[-1.5, -0.5, 0.5, 1.5]).unwrap();
            let mut f = base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(false),
                    weak_12: Some(false),
                    weak_21: Some(false),
                    relation: Some(LossRelation::Constant),
                    a_drift: Some(McVerdict::Present),
                    losses: vec![(1, 0.0, 0.0), (2, 0.5, THIRD)],
                    ..Default::default()
                },
            );
            f.learner = Some(Box::new(PresenceSwitch {
                point: (x(1.0), Label::ONE),
                if_present: 1,
                if_absent: 2,
            }));
            f.learner_consistent = false;
            f
        }
        FixtureId::Ell1 => {
            let process = DriftProcess::uniform(vec![
                dist(&[(0.5, 0.0, 0), (0.5, 1.0, 1)]),
                dist(&[(THIRD, 0.0, 0), (THIRD, 1.0, 1), (THIRD / 2.0, 0.0, 1), (THIRD / 2.0, 1.0, 0)]),
            ])
            .unwrap();
            let class = FiniteHypothesisClass::thresholds(0, &[-0.5, 0.5, 1.5]).unwrap();
            base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(false),
                    weak_12: Some(false),
                    weak_21: Some(false),
                    ell_12: Some(true),
                    ell_12_increase: Some(THIRD),
                    relation: Some(LossRelation::Increasing),
                    real_drift: Some(true),
                    losses: vec![(1, 0.0, THIRD)],
                    ..Default::default()
                },
            )
        }
        FixtureId::Ell2 => {
            let process = DriftProcess::uniform(vec![
                dist(&[(0.25, -1.0, 0), (0.25, 0.0, 0), (0.25, 0.0, 1), (0.25, 1.0, 1)]),
                dist(&[(0.25, -1.0, 0), (0.25, 0.0, 0), (0.25, 0.5, 1), (0.25, 1.0, 1)]),
            ])
            .unwrap();
            let class =
                FiniteHypothesisClass::thresholds(0, &[-1.5, -0.5, 0.25, 0.75, 1.5]).unwrap();
            base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(false),
                    weak_12: Some(true),
                    ell_12: Some(false),
                    relation: Some(LossRelation::Decreasing),
                    losses: vec![(1, 0.25, 0.25), (2, 0.25, 0.0)],
                    ..Default::default()
                },
            )
        }
        FixtureId::Xor => {
            let process = DriftProcess::uniform(vec![xor_grid(XorHalf::Left, 10), xor_grid(XorHalf::Right, 10)])
                .unwrap();
            let class = FiniteHypothesisClass::linear_grid(24, &[-1.0, -0.5, 0.0, 0.5, 1.0]).unwrap();
            base(
                process,
                class,
                ExpectedReport {
                    strong_h: Some(true),
                    weak_12: Some(true),
                    weak_21: Some(true),
                    real_drift: Some(false),
                    relation: Some(LossRelation::Constant),
                    ..Default::default()
                },
            )
        }
    }
}

impl Fixture {
    /// Runs the oracle (and the Monte-Carlo estimate when the fixture has a
    /// learner) and compares against the expectations within `tol`.
    pub fn evaluate(&self, tol: f64, mc: &McParams) -> Result<FixtureOutcome> {
        let report = analyze(&self.process, &self.class, self.loss, &self.w1, &self.w2, tol)?;
        let real_drift = has_real_drift(&self.process, &self.w1, &self.w2, tol)?;
        let a = WindowLosses::for_window(&self.process, &self.class, self.loss, &self.w1)?;
        let b = WindowLosses::for_window(&self.process, &self.class, self.loss, &self.w2)?;
        let losses: Vec<(usize, f64, f64)> = self
            .expected
            .losses
            .iter()
            .map(|&(i, _, _)| (i, a.losses[i], b.losses[i]))
            .collect();
        let a_drift = match (&self.learner, self.expected.a_drift) {
            (Some(learner), Some(_)) => Some(check_a_drift_mc(
                &self.process,
                &self.class,
                learner.as_ref(),
                self.loss,
                &self.w1,
                &self.w2,
                self.a_drift_c,
                mc,
            )?),
            _ => None,
        };

        let e = &self.expected;
        let mut mismatches = Vec::new();
        let mut flag = |name: &str, want: Option<bool>, got: bool| {
            if want.is_some_and(|w| w != got) {
                mismatches.push(format!("{name}: expected {}, observed {got}", want.unwrap()));
            }
        };
        flag("strong_h", e.strong_h, report.strong_h.holds);
        flag("weak_12", e.weak_12, report.weak_h_12.holds);
        flag("weak_21", e.weak_21, report.weak_h_21.holds);
        flag("ell_12", e.ell_12, report.ell_12.holds);
        flag("real_drift", e.real_drift, real_drift);
        let mut close = |name: &str, want: Option<f64>, got: f64| {
            if want.is_some_and(|w| (w - got).abs() > tol) {
                mismatches.push(format!("{name}: expected {}, observed {got}", want.unwrap()));
            }
        };
        close("c_s", e.c_s, report.strong_h.c_s);
        close("ell_12_increase", e.ell_12_increase, report.ell_12.increase);
        close("discrepancy", e.discrepancy, report.discrepancy);
        for (&(i, l1, l2), &(_, o1, o2)) in e.losses.iter().zip(&losses) {
            if (l1 - o1).abs() > tol || (l2 - o2).abs() > tol {
                mismatches.push(format!(
                    "losses of {}: expected ({l1}, {l2}), observed ({o1}, {o2})",
                    self.class.get(i)
                ));
            }
        }
        if let Some(rel) = e.relation {
            if rel != report.optimal_loss_relation {
                mismatches.push(format!(
                    "relation: expected {rel}, observed {}",
                    report.optimal_loss_relation
                ));
            }
        }
        if let (Some(want), Some(est)) = (e.a_drift, a_drift) {
            let got = est.verdict(mc);
            if got != want {
                mismatches.push(format!(
                    "a_drift: expected {want:?}, observed {got:?} (p̂ = {})",
                    est.probability
                ));
            }
        }
        Ok(FixtureOutcome {
            report,
            real_drift,
            a_drift,
            losses,
            mismatches,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XorHalf {
    /// `x₁ ∈ [−1, 0]`
    Left,
    /// `x₁ ∈ [0, 1]`
    Right,
}

impl XorHalf {
    fn x1_range(self) -> (f64, f64) {
        match self {
            XorHalf::Left => (-1.0, 0.0),
            XorHalf::Right => (0.0, 1.0),
        }
    }
}

/// XOR posterior: label 1 iff `x₁ · x₂ > 0`.
pub fn xor_label(x1: f64, x2: f64) -> Label {
    Label::from_bool(x1 * x2 > 0.0)
}

/// Uniform distribution over cell centres of an `n × 2n` grid on one half of
/// the square, labelled by the XOR posterior.
pub fn xor_grid(half: XorHalf, n: usize) -> FiniteDistribution {
    let (lo, _) = half.x1_range();
    let step = 1.0 / n as f64;
    let mut points = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        let x1 = lo + (i as f64 + 0.5) * step;
        for j in 0..2 * n {
            let x2 = -1.0 + (j as f64 + 0.5) * step;
            points.push((Instance::from_numeric(vec![x1, x2]), xor_label(x1, x2)));
        }
    }
    FiniteDistribution::uniform(points).expect("grid is nonempty")
}

/// `n` uniform draws from one half of the square with XOR labels.
pub fn xor_sample(half: XorHalf, n: usize, seed: u64) -> Sample {
    let (lo, hi) = half.x1_range();
    let mut r = rng::rng(seed);
    let points = (0..n)
        .map(|_| {
            let x1 = r.random_range(lo..hi);
            let x2 = r.random_range(-1.0..1.0);
            (Instance::from_numeric(vec![x1, x2]), xor_label(x1, x2))
        })
        .collect();
    Sample {
        points,
        provenance: Provenance {
            window: format!("xor-{half:?}").to_lowercase(),
            seed,
        },
    }
}
