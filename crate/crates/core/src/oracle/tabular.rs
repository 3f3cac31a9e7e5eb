//! The universal class of probabilistic classifiers on a finite support.
//!
//! Enumerating every table is exponential in the support size, so the
//! strong-drift decision for this class is computed per instance: under the
//! squared loss the risk separates over support points and the optimal value
//! at `x` is the conditional mean `P(Y = 1 | x)`.

use crate::error::{domain, Error, Result};
use crate::process::{mean_distribution, DriftProcess, TimeWindow};
use crate::types::Instance;

use super::hypothesis::{FiniteHypothesisClass, Hypothesis};
use super::notions::StrongVerdict;

/// Largest table class [`tabular_universal_class`] will enumerate.
pub const TABULAR_CAP: usize = 1_000_000;

/// Value grid `{0, 1/(g−1), …, 1}` with `g` points.
pub fn value_grid(grid: usize) -> Vec<f64> {
    (0..grid).map(|k| k as f64 / (grid - 1) as f64).collect()
}

/// Every map `support → value_grid(grid)`; `grid^|support|` hypotheses.
pub fn tabular_universal_class(support: &[Instance], grid: usize) -> Result<FiniteHypothesisClass> {
    if support.is_empty() {
        return domain("empty support");
    }
    if grid < 2 {
        return domain("value grid needs at least two points");
    }
    let size = (grid as u128).checked_pow(support.len() as u32);
    match size {
        Some(s) if s <= TABULAR_CAP as u128 => {}
        _ => {
            return Err(Error::Resource(format!(
                "{grid}^{} tables exceed the cap of {TABULAR_CAP}; use the factored optimizer",
                support.len()
            )))
        }
    }
    let values = value_grid(grid);
    let mut digits = vec![0usize; support.len()];
    let mut hs = Vec::new();
    loop {
        let table = support
            .iter()
            .zip(&digits)
            .map(|(x, &d)| (x.clone(), values[d]))
            .collect();
        hs.push(Hypothesis::Tabular {
            table,
            default: 0.0,
        });
        // odometer increment, least significant digit first
        let mut k = 0;
        loop {
            if k == digits.len() {
                return FiniteHypothesisClass::new(hs);
            }
            digits[k] += 1;
            if digits[k] < grid {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

/// Per-instance window statistics: marginal mass and conditional mean.
#[derive(Debug, Clone, PartialEq)]
struct PointStats {
    instance: Instance,
    mass: [f64; 2],
    mean: [f64; 2],
}

fn point_stats(process: &DriftProcess, w1: &TimeWindow, w2: &TimeWindow) -> Result<Vec<PointStats>> {
    let a = mean_distribution(process, w1)?.posterior();
    let b = mean_distribution(process, w2)?.posterior();
    let mut out: Vec<PointStats> = a
        .iter()
        .map(|p| PointStats {
            instance: p.instance.clone(),
            mass: [p.mass, 0.0],
            mean: [p.p_one(), 0.0],
        })
        .collect();
    for p in &b {
        match out.iter_mut().find(|s| s.instance.same_point(&p.instance)) {
            Some(s) => {
                s.mass[1] = p.mass;
                s.mean[1] = p.p_one();
            }
            None => out.push(PointStats {
                instance: p.instance.clone(),
                mass: [0.0, p.mass],
                mean: [0.0, p.p_one()],
            }),
        }
    }
    Ok(out)
}

/// Strong H-model drift for the universal tabular class under squared loss.
///
/// With `grid = None` table values range over all of `[0, 1]`; with
/// `Some(g)` they are restricted to [`value_grid`]`(g)`, which matches
/// enumeration over [`tabular_universal_class`].
/// Drift holds iff the witness constant exceeds `tol`.
pub fn tabular_strong_h(
    process: &DriftProcess,
    w1: &TimeWindow,
    w2: &TimeWindow,
    grid: Option<usize>,
    tol: f64,
) -> Result<StrongVerdict> {
    let stats = point_stats(process, w1, w2)?;
    let values = grid.map(value_grid);
    let mut total = 0.0;
    for s in &stats {
        let risk = |v: f64, i: usize| s.mass[i] * (v - s.mean[i]).powi(2);
        total += match &values {
            None => {
                let m = s.mass[0] + s.mass[1];
                s.mass[0] * s.mass[1] / m * (s.mean[0] - s.mean[1]).powi(2)
            }
            Some(vals) => {
                let best = |i: usize| vals.iter().map(|&v| risk(v, i)).fold(f64::INFINITY, f64::min);
                let (b0, b1) = (best(0), best(1));
                vals.iter()
                    .map(|&v| risk(v, 0) - b0 + risk(v, 1) - b1)
                    .fold(f64::INFINITY, f64::min)
            }
        };
    }
    let c_s = total / 3.0;
    Ok(if c_s > tol {
        StrongVerdict { holds: true, c_s }
    } else {
        StrongVerdict {
            holds: false,
            c_s: 0.0,
        }
    })
}
