//! Seeded small random instances for the property suites.
//!
//! Atoms live on `x ∈ {0, …, 9}` with weights that are multiples of 1/24;
//! classes mix thresholds, set indicators and constants.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::distribution::{Atom, FiniteDistribution};
use crate::process::{DriftProcess, TimeWindow};
use crate::rng::{self, StreamRng};
use crate::types::{Instance, Label, LossFunction};

use super::hypothesis::{Direction, FiniteHypothesisClass, Hypothesis};

pub const MAX_SUPPORT: usize = 6;
pub const MAX_CLASS: usize = 12;
pub const MAX_TIMEPOINTS: usize = 4;
pub const WEIGHT_UNITS: usize = 24;

#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub seed: u64,
    pub process: DriftProcess,
    pub class: FiniteHypothesisClass,
    pub loss: LossFunction,
    pub w1: TimeWindow,
    pub w2: TimeWindow,
}

fn x(v: usize) -> Instance {
    Instance::from_numeric(vec![v as f64])
}

fn random_dist(r: &mut StreamRng, support: &[usize]) -> FiniteDistribution {
    let cells: Vec<(usize, u8)> = support.iter().flat_map(|&v| [(v, 0), (v, 1)]).collect();
    let used = r.random_range(1..=cells.len());
    let chosen: Vec<&(usize, u8)> = cells.choose_multiple(r, used).collect();
    let mut units = vec![0usize; chosen.len()];
    for _ in 0..WEIGHT_UNITS {
        units[r.random_range(0..chosen.len())] += 1;
    }
    let atoms = chosen
        .iter()
        .zip(&units)
        .filter(|(_, &u)| u > 0)
        .map(|(&&(v, y), &u)| Atom::new(u as f64 / WEIGHT_UNITS as f64, x(v), Label::from_bool(y == 1)))
        .collect();
    FiniteDistribution::normalized(atoms).expect("at least one unit is placed")
}

/// Random drift process over ≤ 4 equiprobable time points; later time
/// points copy their predecessor with probability 0.3.
pub fn random_process(r: &mut StreamRng) -> DriftProcess {
    let mut values: Vec<usize> = (0..10).collect();
    values.shuffle(r);
    let support = &values[..r.random_range(1..=MAX_SUPPORT)];
    let n = r.random_range(2..=MAX_TIMEPOINTS);
    let mut dists: Vec<FiniteDistribution> = Vec::with_capacity(n);
    for t in 0..n {
        if t > 0 && r.random_bool(0.3) {
            let prev = dists[t - 1].clone();
            dists.push(prev);
        } else {
            dists.push(random_dist(r, support));
        }
    }
    DriftProcess::uniform(dists).expect("valid process")
}

fn random_window(r: &mut StreamRng, n: usize) -> TimeWindow {
    loop {
        let picked: Vec<usize> = (0..n).filter(|_| r.random_bool(0.5)).collect();
        if let Ok(w) = TimeWindow::new(picked) {
            return w;
        }
    }
}

fn random_hypothesis(r: &mut StreamRng) -> Hypothesis {
    match r.random_range(0..10) {
        0..=5 => Hypothesis::Threshold {
            theta: r.random_range(0..=10) as f64 - 0.5,
            direction: if r.random_bool(0.5) {
                Direction::Greater
            } else {
                Direction::Less
            },
            feature: 0,
        },
        6..=8 => {
            let members = (0..10).filter(|_| r.random_bool(0.3)).map(x).collect();
            Hypothesis::indicator(members)
        }
        _ => Hypothesis::Constant(if r.random_bool(0.5) { 1.0 } else { 0.0 }),
    }
}

pub fn random_class(r: &mut StreamRng) -> FiniteHypothesisClass {
    let k = r.random_range(1..=MAX_CLASS);
    FiniteHypothesisClass::new((0..k).map(|_| random_hypothesis(r)).collect()).expect("nonempty")
}

/// Instance `index` of the suite seeded by `seed`; independent of any other
/// index so suites can be generated in parallel.
pub fn random_instance(seed: u64, index: u64) -> RandomInstance {
    let s = rng::derive(seed, index);
    let mut r = rng::rng(s);
    let process = random_process(&mut r);
    let class = random_class(&mut r);
    let w1 = random_window(&mut r, process.len());
    let w2 = if r.random_bool(0.1) {
        w1.clone()
    } else {
        random_window(&mut r, process.len())
    };
    RandomInstance {
        seed: s,
        process,
        class,
        loss: LossFunction::ZeroOne,
        w1,
        w2,
    }
}
