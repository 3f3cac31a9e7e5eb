//! Exact decision procedures for the drift notions over finite classes.
//!
//! For a finite class the infimum is attained, so the ε/C quantifiers of the
//! definitions collapse to statements about tolerance-based argmin sets:
//! strong drift is disjointness of the two argmin sets, weak drift is a
//! first-window minimizer that is not optimal in the second window.

use crate::distribution::{expected_loss, FiniteDistribution};
use crate::error::Result;
use crate::process::{mean_distribution, DriftProcess, TimeWindow};
use crate::types::{Instance, Label, LossFunction, Predictor};

use super::hypothesis::FiniteHypothesisClass;

/// Default tolerance for loss comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Expected losses of every hypothesis under one distribution.
#[derive(Debug, Clone)]
pub struct WindowLosses {
    pub dist: FiniteDistribution,
    pub losses: Vec<f64>,
    pub min: f64,
}

impl WindowLosses {
    pub fn of(class: &FiniteHypothesisClass, dist: FiniteDistribution, loss: LossFunction) -> Result<Self> {
        class.check_schema(dist.schema())?;
        let losses = class
            .hypotheses()
            .iter()
            .map(|h| expected_loss(h, &dist, loss))
            .collect::<Result<Vec<_>>>()?;
        let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { dist, losses, min })
    }

    pub fn for_window(
        process: &DriftProcess,
        class: &FiniteHypothesisClass,
        loss: LossFunction,
        w: &TimeWindow,
    ) -> Result<Self> {
        Self::of(class, mean_distribution(process, w)?, loss)
    }

    pub fn argmin(&self, tol: f64) -> Vec<usize> {
        (0..self.losses.len())
            .filter(|&i| self.losses[i] <= self.min + tol)
            .collect()
    }

    pub fn is_optimal(&self, i: usize, tol: f64) -> bool {
        self.losses[i] <= self.min + tol
    }

    pub fn gap(&self, i: usize) -> f64 {
        self.losses[i] - self.min
    }
}

/// Indices `i` with `L(h_i) ≤ min L + tol`; never empty.
pub fn argmin_set(
    class: &FiniteHypothesisClass,
    d: &FiniteDistribution,
    loss: LossFunction,
    tol: f64,
) -> Result<Vec<usize>> {
    Ok(WindowLosses::of(class, d.clone(), loss)?.argmin(tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrongVerdict {
    pub holds: bool,
    /// One third of the smallest summed optimality gap; zero without drift.
    pub c_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakVerdict {
    pub holds: bool,
    /// Lowest-index first-window minimizer that is suboptimal afterwards.
    pub witness: Option<usize>,
    /// Largest second-window optimality gap among first-window minimizers.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllVerdict {
    pub holds: bool,
    /// Near-optimal hypothesis with the largest loss increase.
    pub witness: Option<usize>,
    /// Largest loss increase over first-window minimizers.
    pub increase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossRelation {
    Increasing,
    Decreasing,
    Constant,
}

impl LossRelation {
    pub fn non_decreasing(self) -> bool {
        matches!(self, LossRelation::Increasing | LossRelation::Constant)
    }

    pub fn non_increasing(self) -> bool {
        matches!(self, LossRelation::Decreasing | LossRelation::Constant)
    }
}

impl std::fmt::Display for LossRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossRelation::Increasing => "increasing",
            LossRelation::Decreasing => "decreasing",
            LossRelation::Constant => "constant",
        })
    }
}

pub fn strong_between(a: &WindowLosses, b: &WindowLosses, tol: f64) -> StrongVerdict {
    let shared = (0..a.losses.len()).any(|i| a.is_optimal(i, tol) && b.is_optimal(i, tol));
    if shared {
        return StrongVerdict {
            holds: false,
            c_s: 0.0,
        };
    }
    let min_sum = (0..a.losses.len())
        .map(|i| a.gap(i) + b.gap(i))
        .fold(f64::INFINITY, f64::min);
    StrongVerdict {
        holds: true,
        c_s: min_sum / 3.0,
    }
}

pub fn weak_between(from: &WindowLosses, to: &WindowLosses, tol: f64) -> WeakVerdict {
    let mut verdict = WeakVerdict {
        holds: false,
        witness: None,
        gap: 0.0,
    };
    for i in from.argmin(tol) {
        let g = to.gap(i);
        if g > tol {
            verdict.holds = true;
            verdict.witness.get_or_insert(i);
        }
        verdict.gap = verdict.gap.max(g);
    }
    verdict
}

pub fn ell_between(from: &WindowLosses, to: &WindowLosses, tol: f64) -> EllVerdict {
    let mut verdict = EllVerdict {
        holds: false,
        witness: None,
        increase: 0.0,
    };
    for i in from.argmin(tol) {
        let inc = to.losses[i] - from.losses[i];
        if inc > tol && inc > verdict.increase {
            verdict = EllVerdict {
                holds: true,
                witness: Some(i),
                increase: inc,
            };
        }
    }
    verdict
}

pub fn relation_between(a: &WindowLosses, b: &WindowLosses, tol: f64) -> LossRelation {
    if (b.min - a.min).abs() <= tol {
        LossRelation::Constant
    } else if b.min > a.min {
        LossRelation::Increasing
    } else {
        LossRelation::Decreasing
    }
}

pub fn discrepancy_between(a: &WindowLosses, b: &WindowLosses) -> f64 {
    a.losses
        .iter()
        .zip(&b.losses)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Strong H-model drift between two windows, with the witness constant.
pub fn check_strong_h(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w1: &TimeWindow,
    w2: &TimeWindow,
    tol: f64,
) -> Result<StrongVerdict> {
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    Ok(strong_between(&a, &b, tol))
}

pub fn check_weak_h(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w_from: &TimeWindow,
    w_to: &TimeWindow,
    tol: f64,
) -> Result<WeakVerdict> {
    let a = WindowLosses::for_window(process, class, loss, w_from)?;
    let b = WindowLosses::for_window(process, class, loss, w_to)?;
    Ok(weak_between(&a, &b, tol))
}

pub fn check_ell(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w_from: &TimeWindow,
    w_to: &TimeWindow,
    tol: f64,
) -> Result<EllVerdict> {
    let a = WindowLosses::for_window(process, class, loss, w_from)?;
    let b = WindowLosses::for_window(process, class, loss, w_to)?;
    Ok(ell_between(&a, &b, tol))
}

pub fn optimal_loss_relation(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w1: &TimeWindow,
    w2: &TimeWindow,
    tol: f64,
) -> Result<LossRelation> {
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    Ok(relation_between(&a, &b, tol))
}

/// `max_h |L_{W2}(h) − L_{W1}(h)|` over the class.
pub fn discrepancy(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w1: &TimeWindow,
    w2: &TimeWindow,
) -> Result<f64> {
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    Ok(discrepancy_between(&a, &b))
}

/// True iff all near-optimal hypotheses under `d` have pointwise losses
/// within `tol` of each other at every `(x, y)` with `x ∈ domain`.
///
/// Pass the support of `d` to compare on supported atoms only, or the
/// whole data space of a process to get the uniqueness premise of the
/// strong/weak equivalence.
pub fn loss_uniqueness_holds(
    class: &FiniteHypothesisClass,
    d: &FiniteDistribution,
    loss: LossFunction,
    tol: f64,
    domain: &[Instance],
) -> Result<bool> {
    let optimal = argmin_set(class, d, loss, tol)?;
    Ok(uniqueness_among(class, &optimal, loss, tol, domain))
}

pub(crate) fn uniqueness_among(
    class: &FiniteHypothesisClass,
    optimal: &[usize],
    loss: LossFunction,
    tol: f64,
    domain: &[Instance],
) -> bool {
    let Some((&first, rest)) = optimal.split_first() else {
        return true;
    };
    let reference: Vec<[f64; 2]> = domain
        .iter()
        .map(|x| {
            let p = class.get(first).output(x);
            [loss.eval(p, Label::ZERO), loss.eval(p, Label::ONE)]
        })
        .collect();
    rest.iter().all(|&i| {
        domain.iter().zip(&reference).all(|(x, r)| {
            let p = class.get(i).output(x);
            (loss.eval(p, Label::ZERO) - r[0]).abs() <= tol
                && (loss.eval(p, Label::ONE) - r[1]).abs() <= tol
        })
    })
}

/// True iff the class-1 posteriors of the two window distributions differ
/// by more than `tol` at an instance supported by both.
pub fn has_real_drift(
    process: &DriftProcess,
    w1: &TimeWindow,
    w2: &TimeWindow,
    tol: f64,
) -> Result<bool> {
    let a = mean_distribution(process, w1)?.posterior();
    let b = mean_distribution(process, w2)?.posterior();
    Ok(a.iter().any(|pa| {
        b.iter()
            .find(|pb| pb.instance.same_point(&pa.instance))
            .is_some_and(|pb| (pa.p_one() - pb.p_one()).abs() > tol)
    }))
}

/// Oracle verdicts for an ordered window pair, with witnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftReport {
    pub strong_h: StrongVerdict,
    pub weak_h_12: WeakVerdict,
    pub weak_h_21: WeakVerdict,
    pub ell_12: EllVerdict,
    pub ell_21: EllVerdict,
    pub optimal_loss_relation: LossRelation,
    pub discrepancy: f64,
    pub min_loss: (f64, f64),
}

impl DriftReport {
    pub fn from_losses(a: &WindowLosses, b: &WindowLosses, tol: f64) -> Self {
        Self {
            strong_h: strong_between(a, b, tol),
            weak_h_12: weak_between(a, b, tol),
            weak_h_21: weak_between(b, a, tol),
            ell_12: ell_between(a, b, tol),
            ell_21: ell_between(b, a, tol),
            optimal_loss_relation: relation_between(a, b, tol),
            discrepancy: discrepancy_between(a, b),
            min_loss: (a.min, b.min),
        }
    }

    /// Re-derives every witness claim directly from expected losses.
    pub fn witnesses_hold(
        &self,
        class: &FiniteHypothesisClass,
        a: &FiniteDistribution,
        b: &FiniteDistribution,
        loss: LossFunction,
        tol: f64,
    ) -> Result<bool> {
        let l = |i: usize, d: &FiniteDistribution| expected_loss(class.get(i), d, loss);
        let (min_a, min_b) = self.min_loss;
        let mut ok = true;
        if let Some(i) = self.weak_h_12.witness {
            ok &= l(i, a)? <= min_a + tol && l(i, b)? > min_b + tol;
        }
        if let Some(i) = self.weak_h_21.witness {
            ok &= l(i, b)? <= min_b + tol && l(i, a)? > min_a + tol;
        }
        if let Some(i) = self.ell_12.witness {
            ok &= l(i, a)? <= min_a + tol
                && (l(i, b)? - l(i, a)? - self.ell_12.increase).abs() <= tol;
        }
        if let Some(i) = self.ell_21.witness {
            ok &= l(i, b)? <= min_b + tol
                && (l(i, a)? - l(i, b)? - self.ell_21.increase).abs() <= tol;
        }
        if self.strong_h.holds {
            ok &= self.weak_h_12.holds && self.weak_h_21.holds && self.strong_h.c_s > 0.0;
        }
        Ok(ok)
    }
}

/// All oracle verdicts for `(w1, w2)` in one pass.
pub fn analyze(
    process: &DriftProcess,
    class: &FiniteHypothesisClass,
    loss: LossFunction,
    w1: &TimeWindow,
    w2: &TimeWindow,
    tol: f64,
) -> Result<DriftReport> {
    let a = WindowLosses::for_window(process, class, loss, w1)?;
    let b = WindowLosses::for_window(process, class, loss, w2)?;
    Ok(DriftReport::from_losses(&a, &b, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::Atom;
    use crate::oracle::hypothesis::Hypothesis;

    fn x(v: f64) -> Instance {
        Instance::from_numeric(vec![v])
    }

    fn atoms(spec: &[(f64, f64, u8)]) -> FiniteDistribution {
        FiniteDistribution::new(
            spec.iter()
                .map(|&(w, v, y)| Atom::new(w, x(v), Label::new(y).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn singleton_class_argmin() {
        let class = FiniteHypothesisClass::new(vec![Hypothesis::Constant(0.0)]).unwrap();
        let d = atoms(&[(0.5, 0.0, 0), (0.5, 1.0, 1)]);
        assert_eq!(argmin_set(&class, &d, LossFunction::ZeroOne, 1e-9).unwrap(), vec![0]);
    }

    #[test]
    fn perfect_model_beats_constant() {
        let class =
            FiniteHypothesisClass::new(vec![Hypothesis::Constant(0.0), Hypothesis::greater(0.5)])
                .unwrap();
        let d = atoms(&[(0.5, 0.0, 0), (0.5, 1.0, 1)]);
        assert_eq!(argmin_set(&class, &d, LossFunction::ZeroOne, 1e-9).unwrap(), vec![1]);
    }

    #[test]
    fn identical_windows_have_no_drift() {
        let d = atoms(&[(0.5, 0.0, 0), (0.25, 0.0, 1), (0.25, 1.0, 1)]);
        let p = DriftProcess::uniform(vec![d.clone(), d]).unwrap();
        let class = FiniteHypothesisClass::threshold_grid(0, &[&p.timepoints()[0].dist]).unwrap();
        let (w1, w2) = (TimeWindow::single(0), TimeWindow::single(1));
        let r = analyze(&p, &class, LossFunction::ZeroOne, &w1, &w2, 1e-9).unwrap();
        assert_eq!(
            r.strong_h,
            StrongVerdict {
                holds: false,
                c_s: 0.0
            }
        );
        assert!(!r.weak_h_12.holds && !r.weak_h_21.holds);
        assert!(!r.ell_12.holds && !r.ell_21.holds);
        assert_eq!(r.optimal_loss_relation, LossRelation::Constant);
        assert_eq!(r.discrepancy, 0.0);
        assert!(!has_real_drift(&p, &w1, &w2, 1e-9).unwrap());
    }

    #[test]
    fn real_drift_needs_shared_support() {
        let p = DriftProcess::uniform(vec![
            atoms(&[(0.5, 0.0, 0), (0.5, 1.0, 1)]),
            atoms(&[(0.5, 0.0, 1), (0.5, 1.0, 0)]),
            atoms(&[(1.0, 5.0, 1)]),
        ])
        .unwrap();
        let w = |i| TimeWindow::single(i);
        assert!(has_real_drift(&p, &w(0), &w(1), 1e-9).unwrap());
        // virtual only: disjoint supports
        assert!(!has_real_drift(&p, &w(0), &w(2), 1e-9).unwrap());
    }

    #[test]
    fn uniqueness_depends_on_domain() {
        let class = FiniteHypothesisClass::new(vec![
            Hypothesis::greater(1.5),
            Hypothesis::indicator(vec![x(2.0)]),
        ])
        .unwrap();
        let d = atoms(&[(0.5, 1.0, 0), (0.5, 2.0, 1)]);
        let support = d.support();
        let full = vec![x(1.0), x(2.0), x(3.0)];
        let l = LossFunction::ZeroOne;
        assert!(loss_uniqueness_holds(&class, &d, l, 1e-9, &support).unwrap());
        assert!(!loss_uniqueness_holds(&class, &d, l, 1e-9, &full).unwrap());
    }
}
