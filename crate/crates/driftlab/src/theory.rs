//! Fixture and random-instance suites over the drift-notion oracles.

use driftlab_core::oracle::implications::CSV_HEADER;
use driftlab_core::oracle::fixtures::FixtureOutcome;
use driftlab_core::oracle::random::random_instance;
use driftlab_core::oracle::{
    make_fixture, verify_implications, Arrow, Erm, ImplicationCheck, ImplicationParams, FixtureId, McParams, Outcome,
    DEFAULT_TOLERANCE,
};
use driftlab_core::rng::derive;
use rayon::prelude::*;

use crate::error::Result;

/// Minimum agreement rate for the Monte-Carlo arrows.
pub const MIN_STATISTICAL_AGREEMENT: f64 = 0.99;

pub fn run_fixtures(seed: u64) -> Result<Vec<(FixtureId, FixtureOutcome)>> {
    FixtureId::ALL
        .into_par_iter()
        .enumerate()
        .map(|(i, id)| {
            let mc = McParams {
                seed: derive(seed, i as u64),
                ..McParams::default()
            };
            Ok((id, make_fixture(id).evaluate(DEFAULT_TOLERANCE, &mc)?))
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RandomSuite {
    pub seed: u64,
    pub checks: Vec<(u64, ImplicationCheck)>,
}

/// Passes among decided checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub agree: usize,
    pub total: usize,
}

impl Agreement {
    pub fn rate(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.agree as f64 / self.total as f64
        }
    }
}

/// `n` random instances of the suite `seed`, checked with ERM (lowest-index
/// ties) as the declared-consistent learner.
pub fn run_random_suite(n: usize, seed: u64, params: &ImplicationParams) -> Result<RandomSuite> {
    let checks = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let inst = random_instance(seed, i);
            let mut p = params.clone();
            p.mc.seed = derive(inst.seed, 1);
            let check = verify_implications(
                &inst.process,
                &inst.class,
                inst.loss,
                &Erm::LOWEST,
                true,
                &inst.w1,
                &inst.w2,
                &p,
            )?;
            Ok((i, check))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RandomSuite { seed, checks })
}

impl RandomSuite {
    pub fn outcomes(&self, arrow: Arrow) -> impl Iterator<Item = (u64, Outcome)> + '_ {
        self.checks
            .iter()
            .filter_map(move |(i, c)| c.get(arrow).map(|a| (*i, a.outcome)))
    }

    pub fn failures(&self, arrow: Arrow) -> Vec<u64> {
        self.outcomes(arrow)
            .filter(|(_, o)| *o == Outcome::Fail)
            .map(|(i, _)| i)
            .collect()
    }

    /// Failures on arrows decided exactly (no Monte-Carlo estimate).
    pub fn exact_violations(&self) -> usize {
        Arrow::ALL
            .into_iter()
            .filter(|a| !a.is_statistical())
            .map(|a| self.failures(a).len())
            .sum()
    }

    /// Agreement on a Monte-Carlo arrow over its non-vacuous checks.
    /// Inconclusive estimates count as disagreement when `strict`, and are
    /// left out otherwise.
    pub fn agreement(&self, arrow: Arrow, strict: bool) -> Agreement {
        let mut a = Agreement { agree: 0, total: 0 };
        for (_, c) in &self.checks {
            let Some(check) = c.get(arrow) else { continue };
            if check.expected == "vacuous" {
                continue;
            }
            match check.outcome {
                Outcome::Pass => {
                    a.agree += 1;
                    a.total += 1;
                }
                Outcome::Fail => a.total += 1,
                Outcome::Inconclusive if strict => a.total += 1,
                Outcome::Inconclusive | Outcome::NotApplicable => {}
            }
        }
        a
    }

    /// `ℓ-drift ⟺ A-drift` on the instances whose optimal loss is constant.
    /// Inconclusive estimates count as disagreement here.
    pub fn constant_loss_agreement(&self) -> Agreement {
        self.agreement(Arrow::ConstantEllIffADrift, true)
    }

    /// Pooled over every Monte-Carlo arrow.
    pub fn statistical_agreement(&self, strict: bool) -> Agreement {
        let mut total = Agreement { agree: 0, total: 0 };
        for arrow in Arrow::ALL.into_iter().filter(|a| a.is_statistical()) {
            let a = self.agreement(arrow, strict);
            total.agree += a.agree;
            total.total += a.total;
        }
        total
    }

    /// No exact violation, the constant-loss equivalence holds on 99% of
    /// its instances, and every other Monte-Carlo arrow agrees on 99% of its
    /// decided estimates.
    pub fn passed(&self) -> bool {
        self.exact_violations() == 0
            && self.constant_loss_agreement().rate() >= MIN_STATISTICAL_AGREEMENT
            && Arrow::ALL
                .into_iter()
                .filter(|a| a.is_statistical())
                .all(|a| self.agreement(a, false).rate() >= MIN_STATISTICAL_AGREEMENT)
    }

    pub fn csv_rows(&self) -> Vec<[String; 5]> {
        self.checks
            .iter()
            .flat_map(|(i, c)| c.csv_rows(&format!("random-{}-{i}", self.seed)))
            .collect()
    }
}

/// Combined verdict of `verify-theory` / `verify`.
#[derive(Debug, Clone, Default)]
pub struct VerifyReport {
    pub fixtures: Vec<(FixtureId, FixtureOutcome)>,
    pub random: Option<RandomSuite>,
}

impl VerifyReport {
    pub fn fixture_failures(&self) -> Vec<String> {
        self.fixtures
            .iter()
            .filter(|(_, o)| !o.passed())
            .map(|(id, o)| format!("{}: {}", id.name(), o.mismatches.join("; ")))
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.fixture_failures().is_empty() && self.random.as_ref().is_none_or(RandomSuite::passed)
    }

    pub fn header() -> [&'static str; 5] {
        CSV_HEADER
    }

    /// Fixture rows use the arrow `fixture`; random rows come from the
    /// per-arrow checks.
    pub fn csv_rows(&self) -> Vec<[String; 5]> {
        let mut rows: Vec<[String; 5]> = self
            .fixtures
            .iter()
            .map(|(id, o)| {
                [
                    id.name().to_string(),
                    "fixture".into(),
                    "match".into(),
                    if o.passed() {
                        "match".into()
                    } else {
                        o.mismatches.join("; ")
                    },
                    if o.passed() { Outcome::Pass } else { Outcome::Fail }.name().to_string(),
                ]
            })
            .collect();
        if let Some(r) = &self.random {
            rows.extend(r.csv_rows());
        }
        rows
    }

    pub fn summary(&self) -> String {
        let mut lines = vec![format!(
            "fixtures: {}/{} match",
            self.fixtures.len() - self.fixture_failures().len(),
            self.fixtures.len()
        )];
        for f in self.fixture_failures() {
            lines.push(format!("  mismatch {f}"));
        }
        if let Some(r) = &self.random {
            lines.push(format!("random suite: {} instances, seed {}", r.checks.len(), r.seed));
            for arrow in Arrow::ALL {
                let counts = r.outcomes(arrow).fold([0usize; 4], |mut acc, (_, o)| {
                    acc[o as usize] += 1;
                    acc
                });
                lines.push(format!(
                    "  {:<28} pass {:>5}  fail {:>3}  n/a {:>4}  inconclusive {:>3}",
                    arrow.name(),
                    counts[0],
                    counts[1],
                    counts[2],
                    counts[3]
                ));
            }
            let s = r.statistical_agreement(false);
            let c = r.constant_loss_agreement();
            lines.push(format!("  exact violations: {}", r.exact_violations()));
            lines.push(format!(
                "  monte-carlo agreement on decided estimates: {}/{} ({:.2}%)",
                s.agree,
                s.total,
                100.0 * s.rate()
            ));
            lines.push(format!(
                "  constant optimal loss, ell <=> a-drift: {}/{} ({:.2}%)",
                c.agree,
                c.total,
                100.0 * c.rate()
            ));
        }
        lines.join("\n")
    }
}

pub fn verify(fixtures: bool, random: Option<(usize, u64)>, params: &ImplicationParams) -> Result<VerifyReport> {
    Ok(VerifyReport {
        fixtures: if fixtures {
            run_fixtures(random.map_or(0, |r| r.1))?
        } else {
            Vec::new()
        },
        random: random.map(|(n, seed)| run_random_suite(n, seed, params)).transpose()?,
    })
}
