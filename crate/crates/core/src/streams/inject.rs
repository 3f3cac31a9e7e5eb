//! Controlled drift injection: shuffling, binarization, label switches and
//! random-tree segmentation into a 2×2 scenario grid.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::distribution::{FiniteDistribution, Provenance, Sample};
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::types::{Instance, Label};

use super::table::DatasetTable;

/// Uniform row permutation (Fisher–Yates).
pub fn permute(table: &DatasetTable, seed: u64) -> DatasetTable {
    let mut rows = table.rows.clone();
    rows.shuffle(&mut rng::rng(seed));
    table.with_rows(rows)
}

pub const MIN_MINORITY_SHARE: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct Binarization {
    /// Raw labels mapped to 0 and to 1.
    pub groups: [Vec<u32>; 2],
    /// Majority rows dropped to reach the minority share.
    pub dropped: usize,
    pub minority_share: f64,
}

/// Maps raw labels to two groups: classes sorted by frequency (descending,
/// ties by label) each join the currently lighter group (the first group
/// on ties) and become label 0/1 by group. When the minority share is below
/// 25%, majority rows are subsampled (seeded, order kept) until it holds.
pub fn binarize(table: &DatasetTable, seed: u64) -> Result<(DatasetTable, Binarization)> {
    let mut counts = table.label_counts();
    if counts.len() < 2 {
        return Err(Error::Degenerate(format!("{}: fewer than two raw labels", table.name)));
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut groups: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    let mut mass = [0usize; 2];
    for (label, n) in counts {
        let g = usize::from(mass[1] < mass[0]);
        groups[g].push(label);
        mass[g] += n;
    }
    groups.iter_mut().for_each(|g| g.sort_unstable());
    let group_of = |y: u32| u32::from(groups[1].contains(&y));
    let mut rows: Vec<(Instance, u32)> = table.rows.iter().map(|(x, y)| (x.clone(), group_of(*y))).collect();

    let (minor, major) = if mass[0] <= mass[1] { (0u32, 1u32) } else { (1, 0) };
    let n_minor = mass[minor as usize];
    let n_major = mass[major as usize];
    // largest majority count with minor / (minor + major) ≥ 1/4
    let keep = n_major.min(3 * n_minor);
    let mut dropped = 0;
    if keep < n_major {
        let positions: Vec<usize> = rows
            .iter()
            .enumerate()
            .filter(|(_, (_, y))| *y == major)
            .map(|(i, _)| i)
            .collect();
        let mut r = rng::rng(seed);
        let mut retain = vec![false; positions.len()];
        for k in index::sample(&mut r, positions.len(), keep) {
            retain[k] = true;
        }
        let mut drop_row = vec![false; rows.len()];
        for (k, &p) in positions.iter().enumerate() {
            drop_row[p] = !retain[k];
        }
        dropped = n_major - keep;
        let mut i = 0;
        rows.retain(|_| {
            i += 1;
            !drop_row[i - 1]
        });
    }
    let minority_share = n_minor as f64 / (n_minor + keep) as f64;
    Ok((
        table.with_rows(rows),
        Binarization {
            groups,
            dropped,
            minority_share,
        },
    ))
}

/// Label switch `y ↦ 1 − y` applied to every point when `switch` is set.
pub fn inject_real(sample: &Sample, switch: bool) -> Sample {
    if !switch {
        return sample.clone();
    }
    Sample {
        points: sample.iter().map(|(x, y)| (x.clone(), y.flipped())).collect(),
        provenance: Provenance {
            window: format!("{}/switched", sample.provenance.window),
            seed: sample.provenance.seed,
        },
    }
}

/// Flips each label independently with probability `rate`.
pub fn inject_label_noise(sample: &Sample, rate: f64, seed: u64) -> Result<Sample> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain(format!("noise rate {rate} outside [0, 1]")));
    }
    let mut r = rng::rng(seed);
    Ok(Sample {
        points: sample
            .iter()
            .map(|(x, y)| (x.clone(), if r.random_bool(rate) { y.flipped() } else { *y }))
            .collect(),
        provenance: Provenance {
            window: format!("{}/noise{rate}", sample.provenance.window),
            seed,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentTest {
    Numeric { feature: usize, threshold: f64 },
    Categorical { feature: usize, value: u32 },
}

impl SegmentTest {
    fn left(&self, x: &Instance) -> bool {
        match *self {
            SegmentTest::Numeric { feature, threshold } => x.numeric[feature] <= threshold,
            SegmentTest::Categorical { feature, value } => x.categorical[feature] == value,
        }
    }
}

/// Complete binary tree of random splits, stored level by level
/// (node `k` has children `2k+1`, `2k+2`).
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentTree {
    pub depth: usize,
    pub tests: Vec<SegmentTest>,
}

impl SegmentTree {
    /// Leaf index in `0..2^depth`, left to right.
    pub fn leaf_of(&self, x: &Instance) -> usize {
        let mut node = 0;
        for _ in 0..self.depth {
            node = if self.tests[node].left(x) { 2 * node + 1 } else { 2 * node + 2 };
        }
        node - (self.tests.len())
    }

    /// Partition index: even leaves → 0 (A), odd leaves → 1 (B).
    pub fn side_of(&self, x: &Instance) -> usize {
        self.leaf_of(x) % 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub tree: SegmentTree,
    /// Row indices of partition A and B.
    pub parts: [Vec<usize>; 2],
    /// Seed of the attempt that produced two nonempty parts.
    pub seed: u64,
}

pub const SEGMENT_RETRIES: usize = 100;

fn random_tree(table: &DatasetTable, depth: usize, r: &mut StreamRng) -> SegmentTree {
    let schema = table.schema();
    let width = schema.width();
    let mut tests = Vec::with_capacity((1 << depth) - 1);
    // rows reaching each node of the current level
    let mut level: Vec<Vec<usize>> = vec![(0..table.len()).collect()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for rows in &level {
            let f = r.random_range(0..width);
            let test = if f < schema.numeric {
                let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                    let v = table.rows[i].0.numeric[f];
                    (lo.min(v), hi.max(v))
                });
                let threshold = if rows.is_empty() {
                    0.0
                } else if hi > lo {
                    r.random_range(lo..hi)
                } else {
                    lo
                };
                SegmentTest::Numeric { feature: f, threshold }
            } else {
                let c = f - schema.numeric;
                let value = if rows.is_empty() {
                    0
                } else {
                    table.rows[rows[r.random_range(0..rows.len())]].0.categorical[c]
                };
                SegmentTest::Categorical { feature: c, value }
            };
            let (l, rt): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&i| test.left(&table.rows[i].0));
            tests.push(test);
            next.push(l);
            next.push(rt);
        }
        level = next;
    }
    SegmentTree { depth, tests }
}

/// Splits rows into two parts by the leaf parity of a random tree;
/// re-seeds until both parts are nonempty.
pub fn tree_segment(table: &DatasetTable, depth: usize, seed: u64) -> Result<Segmentation> {
    if depth == 0 {
        return Err(Error::Domain("segmentation depth must be at least 1".into()));
    }
    if table.schema().width() == 0 || table.is_empty() {
        return Err(Error::Degenerate("cannot segment an empty table".into()));
    }
    for attempt in 0..SEGMENT_RETRIES {
        let s = rng::derive(seed, attempt as u64);
        let tree = random_tree(table, depth, &mut rng::rng(s));
        let mut parts: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, (x, _)) in table.rows.iter().enumerate() {
            parts[tree.side_of(x)].push(i);
        }
        if parts.iter().all(|p| !p.is_empty()) {
            return Ok(Segmentation { tree, parts, seed: s });
        }
    }
    Err(Error::Degenerate(format!(
        "no nonempty segmentation after {SEGMENT_RETRIES} attempts"
    )))
}

/// `D_ij(X, Y) = D_i(X) · D_j(Y | X)`: marginal `i` is the empirical
/// distribution of partition `i`; posterior 0 is the original labelling and
/// posterior 1 its label switch.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftScenario {
    pub name: String,
    pub partitions: [Vec<(Instance, Label)>; 2],
    pub segmentation: Segmentation,
}

pub const DEFAULT_SEGMENT_DEPTH: usize = 3;

pub fn build_2x2(table: &DatasetTable, depth: usize, seed: u64) -> Result<DriftScenario> {
    let sample = table.to_sample()?;
    let segmentation = tree_segment(table, depth, seed)?;
    let pick = |p: &[usize]| p.iter().map(|&i| sample.points[i].clone()).collect();
    Ok(DriftScenario {
        name: table.name.clone(),
        partitions: [pick(&segmentation.parts[0]), pick(&segmentation.parts[1])],
        segmentation,
    })
}

impl DriftScenario {
    /// Exact cell distribution `D_ij` (uniform over partition `i`).
    pub fn cell_distribution(&self, i: usize, j: usize) -> Result<FiniteDistribution> {
        check_cell(i, j)?;
        FiniteDistribution::uniform(
            self.partitions[i]
                .iter()
                .map(|(x, y)| (x.clone(), if j == 1 { y.flipped() } else { *y }))
                .collect(),
        )
    }
}

fn check_cell(i: usize, j: usize) -> Result<()> {
    if i > 1 || j > 1 {
        return Err(Error::Domain(format!("scenario cell ({i}, {j}) outside 2x2 grid")));
    }
    Ok(())
}

/// `n` rows drawn with replacement from partition `i` under posterior `j`.
/// Cells sharing `i` and `seed` draw the same instances.
pub fn sample_window(scenario: &DriftScenario, i: usize, j: usize, n: usize, seed: u64) -> Result<Sample> {
    check_cell(i, j)?;
    if n == 0 {
        return Err(Error::Domain("window size must be at least 1".into()));
    }
    let part = &scenario.partitions[i];
    let mut r = rng::rng(seed);
    let points = (0..n)
        .map(|_| {
            let (x, y) = &part[r.random_range(0..part.len())];
            (x.clone(), if j == 1 { y.flipped() } else { *y })
        })
        .collect();
    Ok(Sample {
        points,
        provenance: Provenance {
            window: format!("{}/D{i}{j}", scenario.name),
            seed,
        },
    })
}
