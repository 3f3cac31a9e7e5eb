//! Binary CART with weighted Gini impurity.

use rand::seq::index;

use crate::distribution::Sample;
use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::types::{Instance, Label, Schema};

use super::{check_fit_input, check_query, Classifier, LearnerKind, LearnerSpec};

const IMPURITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeParams {
    pub max_depth: usize,
    pub min_leaf: usize,
    /// Features considered per split; `None` means all (plain CART).
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            max_depth: 10,
            min_leaf: 2,
            max_features: None,
        }
    }
}

impl TreeParams {
    pub(crate) fn from_spec(spec: &LearnerSpec, default_depth: usize) -> Result<Self> {
        Ok(Self {
            max_depth: spec.get_usize("depth", default_depth, 1)?,
            min_leaf: spec.get_usize("min_leaf", 2, 1)?,
            max_features: None,
        })
    }
}

/// Goes left when the test holds.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Test {
    /// `x_f ≤ threshold` over numeric feature `f`.
    Numeric { feature: usize, threshold: f64 },
    /// `x_c = value` over categorical feature `c`.
    Categorical { feature: usize, value: u32 },
}

impl Test {
    fn holds(&self, x: &Instance) -> bool {
        match *self {
            Test::Numeric { feature, threshold } => x.numeric[feature] <= threshold,
            Test::Categorical { feature, value } => x.categorical[feature] == value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf { p1: f64 },
    Split { test: Test, left: usize, right: usize },
}

/// A grown tree; `p1` is the weighted class-1 share of the reached leaf.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Cart {
    nodes: Vec<Node>,
}

struct Grower<'a> {
    points: &'a [(Instance, Label)],
    weights: &'a [f64],
    params: TreeParams,
    schema: Schema,
    rng: Option<StreamRng>,
    nodes: Vec<Node>,
}

/// Weighted Gini impurity times total weight: `W − (w₀² + w₁²)/W`.
fn impurity(w0: f64, w1: f64) -> f64 {
    let w = w0 + w1;
    if w <= 0.0 {
        0.0
    } else {
        w - (w0 * w0 + w1 * w1) / w
    }
}

struct Candidate {
    score: f64,
    test: Test,
}

impl Grower<'_> {
    fn class_weights(&self, idx: &[usize]) -> (f64, f64) {
        idx.iter().fold((0.0, 0.0), |(a, b), &i| {
            let w = self.weights[i];
            if self.points[i].1.is_one() {
                (a, b + w)
            } else {
                (a + w, b)
            }
        })
    }

    fn leaf(&mut self, w0: f64, w1: f64) -> usize {
        let p1 = if w0 + w1 > 0.0 { w1 / (w0 + w1) } else { 0.0 };
        self.nodes.push(Node::Leaf { p1 });
        self.nodes.len() - 1
    }

    fn features(&mut self) -> Vec<usize> {
        let d = self.schema.width();
        match (self.params.max_features, self.rng.as_mut()) {
            (Some(m), Some(r)) if m < d => {
                let mut f = index::sample(r, d, m).into_vec();
                f.sort_unstable();
                f
            }
            _ => (0..d).collect(),
        }
    }

    fn grow(&mut self, idx: Vec<usize>, depth: usize) -> usize {
        let (w0, w1) = self.class_weights(&idx);
        let parent = impurity(w0, w1);
        if depth >= self.params.max_depth || idx.len() < 2 * self.params.min_leaf || parent <= IMPURITY_EPS {
            return self.leaf(w0, w1);
        }
        let mut best: Option<Candidate> = None;
        for f in self.features() {
            let cand = if f < self.schema.numeric {
                self.best_numeric(&idx, f)
            } else {
                self.best_categorical(&idx, f - self.schema.numeric)
            };
            if let Some(c) = cand {
                if best.as_ref().is_none_or(|b| c.score < b.score - IMPURITY_EPS) {
                    best = Some(c);
                }
            }
        }
        let Some(best) = best.filter(|b| b.score < parent - IMPURITY_EPS) else {
            return self.leaf(w0, w1);
        };
        let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| best.test.holds(&self.points[i].0));
        self.nodes.push(Node::Leaf { p1: 0.0 });
        let at = self.nodes.len() - 1;
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[at] = Node::Split {
            test: best.test,
            left,
            right,
        };
        at
    }

    fn best_numeric(&self, idx: &[usize], f: usize) -> Option<Candidate> {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| self.points[a].0.numeric[f].total_cmp(&self.points[b].0.numeric[f]));
        let (t0, t1) = self.class_weights(idx);
        let (mut l0, mut l1) = (0.0, 0.0);
        let min_leaf = self.params.min_leaf;
        let mut best: Option<Candidate> = None;
        for k in 0..order.len() - 1 {
            let i = order[k];
            let w = self.weights[i];
            if self.points[i].1.is_one() {
                l1 += w;
            } else {
                l0 += w;
            }
            let v = self.points[i].0.numeric[f];
            let next = self.points[order[k + 1]].0.numeric[f];
            if v == next || k + 1 < min_leaf || order.len() - k - 1 < min_leaf {
                continue;
            }
            let score = impurity(l0, l1) + impurity(t0 - l0, t1 - l1);
            if best.as_ref().is_none_or(|b| score < b.score - IMPURITY_EPS) {
                best = Some(Candidate {
                    score,
                    test: Test::Numeric {
                        feature: f,
                        threshold: v + (next - v) / 2.0,
                    },
                });
            }
        }
        best
    }

    fn best_categorical(&self, idx: &[usize], c: usize) -> Option<Candidate> {
        let mut values: Vec<u32> = idx.iter().map(|&i| self.points[i].0.categorical[c]).collect();
        values.sort_unstable();
        values.dedup();
        if values.len() < 2 {
            return None;
        }
        let (t0, t1) = self.class_weights(idx);
        let mut best: Option<Candidate> = None;
        for value in values {
            let (mut l0, mut l1, mut count) = (0.0, 0.0, 0usize);
            for &i in idx {
                if self.points[i].0.categorical[c] == value {
                    count += 1;
                    if self.points[i].1.is_one() {
                        l1 += self.weights[i];
                    } else {
                        l0 += self.weights[i];
                    }
                }
            }
            if count < self.params.min_leaf || idx.len() - count < self.params.min_leaf {
                continue;
            }
            let score = impurity(l0, l1) + impurity(t0 - l0, t1 - l1);
            if best.as_ref().is_none_or(|b| score < b.score - IMPURITY_EPS) {
                best = Some(Candidate {
                    score,
                    test: Test::Categorical { feature: c, value },
                });
            }
        }
        best
    }
}

impl Cart {
    /// Grows on `points[idx]` (repeats allowed, as for bootstrap samples)
    /// with per-point `weights`. `seed` drives feature subsampling.
    pub(crate) fn grow(
        points: &[(Instance, Label)],
        weights: &[f64],
        idx: Vec<usize>,
        params: TreeParams,
        seed: u64,
    ) -> Cart {
        let schema = points[0].0.schema();
        let mut g = Grower {
            points,
            weights,
            params,
            schema,
            rng: params.max_features.map(|_| rng::rng(seed)),
            nodes: Vec::new(),
        };
        g.grow(idx, 0);
        Cart { nodes: g.nodes }
    }

    pub(crate) fn p1(&self, x: &Instance) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { p1 } => return *p1,
                Node::Split { test, left, right } => at = if test.holds(x) { *left } else { *right },
            }
        }
    }

    pub(crate) fn label(&self, x: &Instance) -> Label {
        Label::from_bool(self.p1(x) > 0.5)
    }

    pub fn depth(&self) -> usize {
        fn d(nodes: &[Node], at: usize) -> usize {
            match &nodes[at] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + d(nodes, *left).max(d(nodes, *right)),
            }
        }
        d(&self.nodes, 0)
    }
}

#[derive(Debug, Clone)]
pub struct DecisionTree {
    spec: LearnerSpec,
    params: TreeParams,
    tree: Option<Cart>,
    schema: Option<Schema>,
}

impl DecisionTree {
    pub fn from_spec(spec: &LearnerSpec) -> Result<Self> {
        if spec.kind != LearnerKind::Dt {
            return Err(Error::Config(format!("{} is not a decision tree", spec.kind)));
        }
        Ok(Self {
            spec: spec.clone(),
            params: TreeParams::from_spec(spec, 10)?,
            tree: None,
            schema: None,
        })
    }

    pub fn depth(&self) -> Option<usize> {
        self.tree.as_ref().map(Cart::depth)
    }
}

impl Classifier for DecisionTree {
    fn spec(&self) -> &LearnerSpec {
        &self.spec
    }

    fn fit(&mut self, sample: &Sample) -> Result<()> {
        let schema = check_fit_input(sample)?;
        let weights = vec![1.0; sample.len()];
        self.tree = Some(Cart::grow(&sample.points, &weights, (0..sample.len()).collect(), self.params, self.spec.seed));
        self.schema = Some(schema);
        Ok(())
    }

    fn score(&self, x: &Instance) -> Result<f64> {
        check_query(self.schema, x)?;
        Ok(self.tree.as_ref().ok_or(Error::NotFitted)?.p1(x))
    }

    fn reset(&mut self) {
        self.tree = None;
        self.schema = None;
    }

    fn is_fitted(&self) -> bool {
        self.tree.is_some()
    }

    fn clone_box(&self) -> Box<dyn Classifier> {
        Box::new(self.clone())
    }
}
