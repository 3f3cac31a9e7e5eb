//! Checks every implication between the drift notions on one instance.

use std::fmt;

use crate::error::Result;
use crate::process::{mean_distribution, DriftProcess, TimeWindow};
use crate::types::LossFunction;

use super::adrift::{a_drift_between, ADriftEstimate, ClassLearner, Erm, McParams, McVerdict};
use super::hypothesis::FiniteHypothesisClass;
use super::notions::{has_real_drift, uniqueness_among, DriftReport, WindowLosses};
use super::tabular::tabular_strong_h;

/// Margin used for the A-drift event when neither a strong-drift nor an
/// ℓ-drift constant is available.
pub const FALLBACK_A_DRIFT_C: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arrow {
    /// Real drift implies a change of the joint distribution.
    RealImpliesDrift,
    /// ℓ-model drift implies a change of the joint distribution.
    EllImpliesDrift,
    /// Weak H-model drift implies a change of the joint distribution.
    WeakImpliesDrift,
    StrongImpliesWeak,
    /// Weak drift plus loss uniqueness implies strong drift.
    WeakUniqueImpliesStrong,
    /// Strong drift implies A-drift for consistent learners.
    StrongImpliesADrift,
    /// A-drift implies weak drift for consistent learners.
    ADriftImpliesWeak,
    /// Two consistent learners agree on A-drift under loss uniqueness.
    LearnerAgnostic,
    NonDecreasingWeakImpliesEll,
    NonIncreasingEllImpliesWeak,
    /// Under constant optimal loss, ℓ-drift iff A-drift.
    ConstantEllIffADrift,
    /// Real drift iff strong drift of the tabular class under squared loss.
    RealIffTabularStrong,
    /// `L_{W2}(h) ≤ L_{W1}(h) + discrepancy` for every h, both ways.
    DiscrepancyBound,
}

impl Arrow {
    pub const ALL: [Arrow; 13] = [
        Arrow::RealImpliesDrift,
        Arrow::EllImpliesDrift,
        Arrow::WeakImpliesDrift,
        Arrow::StrongImpliesWeak,
        Arrow::WeakUniqueImpliesStrong,
        Arrow::StrongImpliesADrift,
        Arrow::ADriftImpliesWeak,
        Arrow::LearnerAgnostic,
        Arrow::NonDecreasingWeakImpliesEll,
        Arrow::NonIncreasingEllImpliesWeak,
        Arrow::ConstantEllIffADrift,
        Arrow::RealIffTabularStrong,
        Arrow::DiscrepancyBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Arrow::RealImpliesDrift => "real=>drift",
            Arrow::EllImpliesDrift => "ell=>drift",
            Arrow::WeakImpliesDrift => "weak=>drift",
            Arrow::StrongImpliesWeak => "strong=>weak",
            Arrow::WeakUniqueImpliesStrong => "weak&unique=>strong",
            Arrow::StrongImpliesADrift => "strong=>a-drift",
            Arrow::ADriftImpliesWeak => "a-drift=>weak",
            Arrow::LearnerAgnostic => "unique=>a-drift-agnostic",
            Arrow::NonDecreasingWeakImpliesEll => "nondecreasing&weak=>ell",
            Arrow::NonIncreasingEllImpliesWeak => "nonincreasing&ell=>weak",
            Arrow::ConstantEllIffADrift => "constant=>(ell<=>a-drift)",
            Arrow::RealIffTabularStrong => "real<=>tabular-strong",
            Arrow::DiscrepancyBound => "discrepancy-bound",
        }
    }

    /// Whether the arrow is decided by Monte-Carlo estimates.
    pub fn is_statistical(self) -> bool {
        matches!(
            self,
            Arrow::StrongImpliesADrift
                | Arrow::ADriftImpliesWeak
                | Arrow::LearnerAgnostic
                | Arrow::ConstantEllIffADrift
        )
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Pass,
    Fail,
    /// A side condition (learner consistency) is not met.
    NotApplicable,
    /// A Monte-Carlo estimate fell between the verdict thresholds.
    Inconclusive,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::NotApplicable => "n/a",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrowCheck {
    pub arrow: Arrow,
    pub expected: String,
    pub observed: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct ImplicationParams {
    pub tol: f64,
    pub mc: McParams,
    /// Run the Monte-Carlo arrows at all.
    pub monte_carlo: bool,
    /// Compare against ERM with highest-index tie-breaking when uniqueness
    /// holds (doubles the Monte-Carlo work on those instances).
    pub tie_break_check: bool,
}

impl Default for ImplicationParams {
    fn default() -> Self {
        Self {
            tol: super::notions::DEFAULT_TOLERANCE,
            mc: McParams::default(),
            monte_carlo: true,
            tie_break_check: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ImplicationCheck {
    pub report: DriftReport,
    pub real_drift: bool,
    pub distribution_drift: bool,
    pub unique: (bool, bool),
    pub a_drift_c: f64,
    pub a_drift: Option<ADriftEstimate>,
    pub checks: Vec<ArrowCheck>,
}

impl ImplicationCheck {
    pub fn get(&self, arrow: Arrow) -> Option<&ArrowCheck> {
        self.checks.iter().find(|c| c.arrow == arrow)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ArrowCheck> {
        self.checks.iter().filter(|c| c.outcome == Outcome::Fail)
    }

    /// Rows `instance_id,arrow,expected,observed,pass`.
    pub fn csv_rows(&self, instance_id: &str) -> Vec<[String; 5]> {
        self.checks
            .iter()
            .map(|c| {
                [
                    instance_id.to_string(),
                    c.arrow.name().to_string(),
                    c.expected.clone(),
                    c.observed.clone(),
                    c.outcome.name().to_string(),
                ]
            })
            .collect()
    }
}

pub const CSV_HEADER: [&str; 5] = ["instance_id", "arrow", "expected", "observed", "pass"];

/// `a ⇒ b`: vacuous pass when `a` fails.
fn implication(arrow: Arrow, a: bool, b: bool) -> ArrowCheck {
    ArrowCheck {
        arrow,
        expected: if a { "true".into() } else { "vacuous".into() },
        observed: b.to_string(),
        outcome: if !a || b { Outcome::Pass } else { Outcome::Fail },
    }
}

fn not_applicable(arrow: Arrow, observed: String) -> ArrowCheck {
    ArrowCheck {
        arrow,
        expected: "-".into(),
        observed,
        outcome: Outcome::NotApplicable,
    }
}

fn verdict_name(v: McVerdict) -> &'static str {
    match v {
        McVerdict::Present => "present",
        McVerdict::Absent => "absent",
        McVerdict::Inconclusive => "inconclusive",
    }
}

/// Margin for the A-drift event: `C_s/2` under strong drift, else half the
/// ℓ-drift increase, else [`FALLBACK_A_DRIFT_C`].
pub fn default_a_drift_c(report: &DriftReport) -> f64 {
    if report.strong_h.holds {
        report.strong_h.c_s / 2.0
    } else if report.ell_12.holds {
        report.ell_12.increase / 2.0
    } else {
        FALLBACK_A_DRIFT_C
    }
}

/// Evaluates each arrow from `w1` to `w2`. Arrows on A-drift are only
/// asserted when `learner_consistent` is declared.
#[allow(clippy::too_many_arguments)]
pub fn verify_implications(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    learner: &dyn ClassLearner,
    learner_consistent: bool,
    w1: &TimeWindow,
    w2: &TimeWindow,
    params: &ImplicationParams,
) -> Result<ImplicationCheck> {
    let tol = params.tol;
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    let report = DriftReport::from_losses(&a, &b, tol);
    let real_drift = has_real_drift(process, w1, w2, tol)?;
    let distribution_drift =
        mean_distribution(process, w1)?.total_variation(&mean_distribution(process, w2)?) > tol;
    let domain = process.domain();
    let unique = (
        uniqueness_among(class, &a.argmin(tol), loss, tol, &domain),
        uniqueness_among(class, &b.argmin(tol), loss, tol, &domain),
    );
    let c = default_a_drift_c(&report);

    let mut checks = vec![
        implication(Arrow::RealImpliesDrift, real_drift, distribution_drift),
        implication(Arrow::EllImpliesDrift, report.ell_12.holds, distribution_drift),
        implication(Arrow::WeakImpliesDrift, report.weak_h_12.holds, distribution_drift),
        implication(
            Arrow::StrongImpliesWeak,
            report.strong_h.holds,
            report.weak_h_12.holds && report.weak_h_21.holds,
        ),
        implication(
            Arrow::WeakUniqueImpliesStrong,
            (report.weak_h_12.holds && unique.0) || (report.weak_h_21.holds && unique.1),
            report.strong_h.holds,
        ),
    ];

    let a_drift = if params.monte_carlo {
        Some(a_drift_between(class, learner, loss, &a, &b, c, &params.mc)?)
    } else {
        None
    };
    let verdict = a_drift.map(|e| e.verdict(&params.mc));
    let mc_arrows = [
        Arrow::StrongImpliesADrift,
        Arrow::ADriftImpliesWeak,
        Arrow::LearnerAgnostic,
    ];
    match verdict {
        None => {}
        Some(v) if !learner_consistent => {
            for arrow in mc_arrows {
                checks.push(not_applicable(arrow, verdict_name(v).into()));
            }
        }
        Some(v) => {
            checks.push(if !report.strong_h.holds {
                implication(Arrow::StrongImpliesADrift, false, v == McVerdict::Present)
            } else {
                mc_check(Arrow::StrongImpliesADrift, "present", v, v == McVerdict::Present)
            });
            checks.push(if v == McVerdict::Present {
                implication(Arrow::ADriftImpliesWeak, true, report.weak_h_12.holds)
            } else {
                // Inconclusive estimates make no claim either way.
                implication(Arrow::ADriftImpliesWeak, false, report.weak_h_12.holds)
            });
            if params.tie_break_check && unique.0 && unique.1 {
                let other = a_drift_between(class, &Erm::HIGHEST, loss, &a, &b, c, &params.mc)?;
                let w = other.verdict(&params.mc);
                let agree = v == w && v != McVerdict::Inconclusive;
                checks.push(ArrowCheck {
                    arrow: Arrow::LearnerAgnostic,
                    expected: verdict_name(v).into(),
                    observed: verdict_name(w).into(),
                    outcome: if agree {
                        Outcome::Pass
                    } else if v == McVerdict::Inconclusive || w == McVerdict::Inconclusive {
                        Outcome::Inconclusive
                    } else {
                        Outcome::Fail
                    },
                });
            } else {
                checks.push(implication(Arrow::LearnerAgnostic, false, true));
            }
        }
    }

    checks.push(implication(
        Arrow::NonDecreasingWeakImpliesEll,
        report.optimal_loss_relation.non_decreasing() && report.weak_h_12.holds,
        report.ell_12.holds,
    ));
    checks.push(implication(
        Arrow::NonIncreasingEllImpliesWeak,
        report.optimal_loss_relation.non_increasing() && report.ell_12.holds,
        report.weak_h_12.holds,
    ));

    if let Some(v) = verdict {
        let constant = report.optimal_loss_relation == super::notions::LossRelation::Constant;
        checks.push(if !learner_consistent {
            not_applicable(Arrow::ConstantEllIffADrift, verdict_name(v).into())
        } else if !constant {
            implication(Arrow::ConstantEllIffADrift, false, v == McVerdict::Present)
        } else {
            let want = if report.ell_12.holds { "present" } else { "absent" };
            mc_check(
                Arrow::ConstantEllIffADrift,
                want,
                v,
                (v == McVerdict::Present) == report.ell_12.holds,
            )
        });
    }

    let tabular = tabular_strong_h(process, w1, w2, None, tol)?;
    checks.push(ArrowCheck {
        arrow: Arrow::RealIffTabularStrong,
        expected: real_drift.to_string(),
        observed: tabular.holds.to_string(),
        outcome: if real_drift == tabular.holds {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
    });

    let worst = a
        .losses
        .iter()
        .zip(&b.losses)
        .map(|(l1, l2)| (l2 - l1).abs() - report.discrepancy)
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(ArrowCheck {
        arrow: Arrow::DiscrepancyBound,
        expected: format!("<= {}", report.discrepancy),
        observed: format!("slack {worst:e}"),
        outcome: if worst <= 1e-9 {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
    });

    Ok(ImplicationCheck {
        report,
        real_drift,
        distribution_drift,
        unique,
        a_drift_c: c,
        a_drift,
        checks,
    })
}

fn mc_check(arrow: Arrow, expected: &str, v: McVerdict, ok: bool) -> ArrowCheck {
    ArrowCheck {
        arrow,
        expected: expected.into(),
        observed: verdict_name(v).into(),
        outcome: if v == McVerdict::Inconclusive {
            Outcome::Inconclusive
        } else if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::fixtures::{make_fixture, FixtureId};

    fn quick() -> ImplicationParams {
        ImplicationParams {
            mc: McParams {
                trials: 100,
                ..McParams::default()
            },
            ..ImplicationParams::default()
        }
    }

    #[test]
    fn no_drift_passes_vacuously() {
        let f = make_fixture(FixtureId::Ce2);
        let w = TimeWindow::single(0);
        let check = verify_implications(&f.process, &f.class, f.loss, &Erm::LOWEST, true, &w, &w, &quick()).unwrap();
        assert!(check.checks.iter().all(|c| c.outcome == Outcome::Pass), "{:?}", check.checks);
        assert!(!check.report.strong_h.holds && !check.report.weak_h_12.holds && !check.real_drift);
    }

    #[test]
    fn inconsistent_learner_flags_not_applicable() {
        let f = make_fixture(FixtureId::Ce3);
        let learner = f.learner.as_deref().unwrap();
        let check = verify_implications(&f.process, &f.class, f.loss, learner, false, &f.w1, &f.w2, &quick()).unwrap();
        assert_eq!(check.get(Arrow::ADriftImpliesWeak).unwrap().outcome, Outcome::NotApplicable);
        assert_eq!(check.a_drift.unwrap().verdict(&quick().mc), McVerdict::Present);
        assert!(!check.report.weak_h_12.holds);
        assert_eq!(check.violations().count(), 0);
    }
}
