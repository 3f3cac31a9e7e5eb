//! Synthetic benchmark generators.
//!
//! Each generator is a pure function of its configuration (including the
//! seed) and the row count. Raw labels may be multiclass (LED, RandomRBF
//! with more than two classes); binarize before learning.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::rng::{self, StreamRng};
use crate::types::Instance;

use super::table::DatasetTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    Sea,
    Sine,
    Stagger,
    Mixed,
    Led,
    Agrawal,
    RandomRbf,
    RandomTree,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 8] = [
        GeneratorKind::Sea,
        GeneratorKind::Sine,
        GeneratorKind::Stagger,
        GeneratorKind::Mixed,
        GeneratorKind::Led,
        GeneratorKind::Agrawal,
        GeneratorKind::RandomRbf,
        GeneratorKind::RandomTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Sea => "sea",
            GeneratorKind::Sine => "sine",
            GeneratorKind::Stagger => "stagger",
            GeneratorKind::Mixed => "mixed",
            GeneratorKind::Led => "led",
            GeneratorKind::Agrawal => "agrawal",
            GeneratorKind::RandomRbf => "random-rbf",
            GeneratorKind::RandomTree => "random-tree",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            GeneratorKind::Sea => &["concept", "noise"],
            GeneratorKind::Sine => &["freq", "noise"],
            GeneratorKind::Stagger => &["concept"],
            GeneratorKind::Mixed => &["noise"],
            GeneratorKind::Led => &["noise", "irrelevant"],
            GeneratorKind::Agrawal => &["function", "noise"],
            GeneratorKind::RandomRbf => &["centroids", "features", "classes"],
            GeneratorKind::RandomTree => &["depth", "features"],
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = match s.as_str() {
            "rbf" | "randomrbf" => "random-rbf",
            "randomtree" | "tree" => "random-tree",
            other => other,
        };
        GeneratorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown generator `{s}`")))
    }
}

/// Generator plus parameters, parsable from `sea:concept=2,noise=0.0,seed=7`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub kind: GeneratorKind,
    pub params: BTreeMap<String, f64>,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(kind: GeneratorKind) -> Self {
        Self {
            kind,
            params: BTreeMap::new(),
            seed: 0,
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Result<Self> {
        if !self.kind.allowed().contains(&key) {
            return Err(Error::Config(format!(
                "`{key}` is not a parameter of {} (expected one of {})",
                self.kind,
                self.kind.allowed().join(", ")
            )));
        }
        self.params.insert(key.to_string(), value);
        Ok(self)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }

    fn noise(&self) -> Result<f64> {
        let p = self.get("noise", 0.0);
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!("{}: noise {p} outside [0, 1]", self.kind)));
        }
        Ok(p)
    }

    fn index(&self, key: &str, default: usize, lo: usize, hi: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v.fract() != 0.0 || v < lo as f64 || v > hi as f64 {
            return Err(Error::Config(format!("{}: `{key}` must be an integer in [{lo}, {hi}], got {v}", self.kind)));
        }
        Ok(v as usize)
    }
}

impl FromStr for GeneratorConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut cfg = GeneratorConfig::new(kind.parse()?);
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got `{pair}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "seed" {
                cfg.seed = v.parse().map_err(|_| Error::Config(format!("bad seed `{v}`")))?;
            } else {
                let x: f64 = v.parse().map_err(|_| Error::Config(format!("bad value `{k}={v}`")))?;
                cfg = cfg.with(k, x)?;
            }
        }
        Ok(cfg)
    }
}

impl fmt::Display for GeneratorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        let mut parts: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.push(format!("seed={}", self.seed));
        write!(f, ":{}", parts.join(","))
    }
}

/// SEA thresholds per concept 1–4.
pub const SEA_THRESHOLDS: [f64; 4] = [8.0, 9.0, 7.0, 9.5];

pub fn sea_label(a1: f64, a2: f64, theta: f64) -> bool {
    a1 + a2 <= theta
}

/// STAGGER concepts over (size, color, shape), each in {0, 1, 2}:
/// size small/medium/large, color red/green/blue, shape triangle/circle/rectangle.
pub fn stagger_label(concept: usize, size: u32, color: u32, shape: u32) -> bool {
    match concept {
        1 => size == 0 && color == 0,
        2 => color == 1 || shape == 1,
        _ => size == 1 || size == 2,
    }
}

/// Seven-segment encoding of digits 0–9 (segments a–g).
pub const LED_SEGMENTS: [[u8; 7]; 10] = [
    [1, 1, 1, 0, 1, 1, 1],
    [0, 0, 1, 0, 0, 1, 0],
    [1, 0, 1, 1, 1, 0, 1],
    [1, 0, 1, 1, 0, 1, 1],
    [0, 1, 1, 1, 0, 1, 0],
    [1, 1, 0, 1, 0, 1, 1],
    [1, 1, 0, 1, 1, 1, 1],
    [1, 0, 1, 0, 0, 1, 0],
    [1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 1, 1],
];

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn flip(r: &mut StreamRng, y: bool, p: f64) -> bool {
    if p > 0.0 && r.random_bool(p) {
        !y
    } else {
        y
    }
}

/// Produces `n` rows from the configured generator.
pub fn generate(config: &GeneratorConfig, n: usize) -> Result<DatasetTable> {
    if n == 0 {
        return Err(Error::Domain("row count must be at least 1".into()));
    }
    let mut r = rng::rng(config.seed);
    let name = config.kind.name();
    match config.kind {
        GeneratorKind::Sea => {
            let concept = config.index("concept", 1, 1, 4)?;
            let noise = config.noise()?;
            let theta = SEA_THRESHOLDS[concept - 1];
            let rows = (0..n)
                .map(|_| {
                    let a: Vec<f64> = (0..3).map(|_| r.random_range(0.0..10.0)).collect();
                    let y = flip(&mut r, sea_label(a[0], a[1], theta), noise);
                    (Instance::from_numeric(a), y as u32)
                })
                .collect();
            DatasetTable::new(name, strs(&["a1", "a2", "a3"]), vec![], rows)
        }
        GeneratorKind::Sine => {
            let freq = config.get("freq", 1.0);
            let noise = config.noise()?;
            let rows = (0..n)
                .map(|_| {
                    let x1: f64 = r.random_range(0.0..1.0);
                    let x2: f64 = r.random_range(0.0..1.0);
                    let y = flip(&mut r, x2 < (x1 * std::f64::consts::PI * freq).sin(), noise);
                    (Instance::from_numeric(vec![x1, x2]), y as u32)
                })
                .collect();
            DatasetTable::new(name, strs(&["x1", "x2"]), vec![], rows)
        }
        GeneratorKind::Stagger => {
            let concept = config.index("concept", 2, 1, 3)?;
            let rows = (0..n)
                .map(|_| {
                    let c: Vec<u32> = (0..3).map(|_| r.random_range(0..3)).collect();
                    let y = stagger_label(concept, c[0], c[1], c[2]);
                    (Instance { numeric: vec![], categorical: c }, y as u32)
                })
                .collect();
            DatasetTable::new(name, vec![], strs(&["size", "color", "shape"]), rows)
        }
        GeneratorKind::Mixed => {
            let noise = config.noise()?;
            let rows = (0..n)
                .map(|_| {
                    let v: u32 = r.random_range(0..2);
                    let w: u32 = r.random_range(0..2);
                    let x: f64 = r.random_range(0.0..1.0);
                    let z: f64 = r.random_range(0.0..1.0);
                    let curve = z < 0.5 + 0.3 * (3.0 * std::f64::consts::PI * x).sin();
                    let votes = v + w + curve as u32;
                    let y = flip(&mut r, votes >= 2, noise);
                    (Instance { numeric: vec![x, z], categorical: vec![v, w] }, y as u32)
                })
                .collect();
            DatasetTable::new(name, strs(&["x", "y"]), strs(&["v", "w"]), rows)
        }
        GeneratorKind::Led => {
            let noise = config.noise()?;
            let irrelevant = config.index("irrelevant", 17, 0, 1000)?;
            let rows = (0..n)
                .map(|_| {
                    let digit = r.random_range(0..10usize);
                    let mut x: Vec<f64> = LED_SEGMENTS[digit]
                        .iter()
                        .map(|&s| flip(&mut r, s == 1, noise) as u8 as f64)
                        .collect();
                    x.extend((0..irrelevant).map(|_| r.random_range(0..2u8) as f64));
                    (Instance::from_numeric(x), digit as u32)
                })
                .collect();
            DatasetTable::new(name, names("s", 7 + irrelevant), vec![], rows)
        }
        GeneratorKind::Agrawal => {
            let function = config.get("function", 1.0);
            if !(function == 1.0 || function == 2.0 || function == 3.0) {
                return Err(Error::Unsupported(format!("agrawal function {function} (only 1-3 are implemented)")));
            }
            let noise = config.noise()?;
            let rows = (0..n)
                .map(|_| {
                    let a = agrawal_attributes(&mut r);
                    let y = flip(&mut r, agrawal_label(function as usize, &a), noise);
                    (a, y as u32)
                })
                .collect();
            DatasetTable::new(
                name,
                strs(&["salary", "commission", "age", "hvalue", "hyears", "loan"]),
                strs(&["elevel", "car", "zipcode"]),
                rows,
            )
        }
        GeneratorKind::RandomRbf => {
            let c = config.index("centroids", 10, 1, 10_000)?;
            let d = config.index("features", 10, 1, 1000)?;
            let k = config.index("classes", 2, 2, 1000)?;
            let mut cr = rng::rng(rng::derive(config.seed, 1));
            let centroids: Vec<(Vec<f64>, u32, f64, f64)> = (0..c)
                .map(|i| {
                    let centre: Vec<f64> = (0..d).map(|_| cr.random_range(0.0..1.0)).collect();
                    // round-robin classes guarantee every class has a centroid
                    let class = (i % k) as u32;
                    (centre, class, cr.random_range(0.0..1.0), cr.random_range(0.0..1.0))
                })
                .collect();
            let total: f64 = centroids.iter().map(|c| c.2).sum();
            let rows = (0..n)
                .map(|_| {
                    let mut u = r.random_range(0.0..total);
                    let mut pick = &centroids[c - 1];
                    for cand in &centroids {
                        if u < cand.2 {
                            pick = cand;
                            break;
                        }
                        u -= cand.2;
                    }
                    let dir: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
                    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                    let mag = Normal::new(0.0, pick.3).expect("finite std").sample(&mut r);
                    let x = pick.0.iter().zip(&dir).map(|(c, v)| c + v / norm * mag).collect();
                    (Instance::from_numeric(x), pick.1)
                })
                .collect();
            DatasetTable::new(name, names("x", d), vec![], rows)
        }
        GeneratorKind::RandomTree => {
            let concept = random_tree_concept(config)?;
            let rows = (0..n)
                .map(|_| {
                    let x: Vec<f64> = (0..concept.features).map(|_| r.random_range(0.0..1.0)).collect();
                    let x = Instance::from_numeric(x);
                    let y = concept.label(&x) as u32;
                    (x, y)
                })
                .collect();
            DatasetTable::new(name, names("x", concept.features), vec![], rows)
        }
    }
}

fn agrawal_attributes(r: &mut StreamRng) -> Instance {
    let salary = r.random_range(20_000.0..150_000.0);
    let commission = if salary >= 75_000.0 {
        0.0
    } else {
        r.random_range(10_000.0..75_000.0)
    };
    let age = r.random_range(20..=80i32) as f64;
    let elevel = r.random_range(0..5u32);
    let car = r.random_range(1..=20u32);
    let zipcode = r.random_range(0..9u32);
    let hvalue = (9 - zipcode) as f64 * 100_000.0 * r.random_range(0.5..1.5);
    let hyears = r.random_range(1..=30i32) as f64;
    let loan = r.random_range(0.0..500_000.0);
    Instance {
        numeric: vec![salary, commission, age, hvalue, hyears, loan],
        categorical: vec![elevel, car, zipcode],
    }
}

/// AGRAWAL classification functions 1–3 (group A ↦ label 1).
pub fn agrawal_label(function: usize, x: &Instance) -> bool {
    let (salary, age) = (x.numeric[0], x.numeric[2]);
    let elevel = x.categorical[0];
    match function {
        1 => !(40.0..60.0).contains(&age),
        2 => {
            if age < 40.0 {
                (50_000.0..=100_000.0).contains(&salary)
            } else if age < 60.0 {
                (75_000.0..=125_000.0).contains(&salary)
            } else {
                (25_000.0..=75_000.0).contains(&salary)
            }
        }
        _ => {
            if age < 40.0 {
                elevel <= 1
            } else if age < 60.0 {
                (1..=3).contains(&elevel)
            } else {
                elevel >= 2
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ConceptNode {
    Leaf(bool),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<ConceptNode>,
        right: Box<ConceptNode>,
    },
}

/// The labelling tree behind the RandomTree generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomTreeConcept {
    pub features: usize,
    root: ConceptNode,
}

impl RandomTreeConcept {
    pub fn label(&self, x: &Instance) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                ConceptNode::Leaf(y) => return *y,
                ConceptNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x.numeric[*feature] <= *threshold { left } else { right },
            }
        }
    }
}

/// The tree a RandomTree configuration labels with: random feature and
/// uniform split inside the node's box at every level; sibling leaves get
/// opposite labels so both classes occur.
pub fn random_tree_concept(config: &GeneratorConfig) -> Result<RandomTreeConcept> {
    let depth = config.index("depth", 5, 1, 20)?;
    let features = config.index("features", 5, 1, 1000)?;
    let mut r = rng::rng(rng::derive(config.seed, 0x7ee));
    fn build(r: &mut StreamRng, depth: usize, bounds: &mut Vec<(f64, f64)>, leaf_label: bool) -> ConceptNode {
        if depth == 0 {
            return ConceptNode::Leaf(leaf_label);
        }
        let feature = r.random_range(0..bounds.len());
        let (lo, hi) = bounds[feature];
        let threshold = if hi - lo > 1e-12 { r.random_range(lo..hi) } else { lo };
        let first: bool = r.random();
        bounds[feature] = (lo, threshold);
        let left = build(r, depth - 1, bounds, first);
        bounds[feature] = (threshold, hi);
        let right = build(r, depth - 1, bounds, !first);
        bounds[feature] = (lo, hi);
        ConceptNode::Split {
            feature,
            threshold,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
    let mut bounds = vec![(0.0, 1.0); features];
    let root = build(&mut r, depth, &mut bounds, false);
    Ok(RandomTreeConcept { features, root })
}
