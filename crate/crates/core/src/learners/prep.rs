//! Feature preprocessing shared by distance-based and linear learners.

use crate::distribution::Sample;
use crate::types::Instance;

/// Per-feature z-scoring fitted on a sample; constant features get unit
/// scale so they contribute nothing.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(sample: &Sample) -> Self {
        let d = sample.schema().map_or(0, |s| s.numeric);
        let n = sample.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for (x, _) in sample.iter() {
            for (m, v) in mean.iter_mut().zip(&x.numeric) {
                *m += v / n;
            }
        }
        let mut var = vec![0.0; d];
        for (x, _) in sample.iter() {
            for ((s, v), m) in var.iter_mut().zip(&x.numeric).zip(&mean) {
                *s += (v - m).powi(2) / n;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 })
            .collect();
        Self { mean, scale }
    }

    pub fn z(&self, i: usize, v: f64) -> f64 {
        (v - self.mean[i]) / self.scale[i]
    }
}

/// Standardized numerics, one-hot categoricals (categories seen at fit
/// time; unseen values encode as all zeros) and a trailing bias 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Encoder {
    pub std: Standardizer,
    pub categories: Vec<Vec<u32>>,
}

impl Encoder {
    pub fn fit(sample: &Sample) -> Self {
        let c = sample.schema().map_or(0, |s| s.categorical);
        let mut categories = vec![Vec::new(); c];
        for (x, _) in sample.iter() {
            for (cats, v) in categories.iter_mut().zip(&x.categorical) {
                if let Err(pos) = cats.binary_search(v) {
                    cats.insert(pos, *v);
                }
            }
        }
        Self {
            std: Standardizer::fit(sample),
            categories,
        }
    }

    pub fn width(&self) -> usize {
        self.std.mean.len() + self.categories.iter().map(Vec::len).sum::<usize>() + 1
    }

    pub fn encode(&self, x: &Instance) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width());
        out.extend(x.numeric.iter().enumerate().map(|(i, v)| self.std.z(i, *v)));
        for (cats, v) in self.categories.iter().zip(&x.categorical) {
            let start = out.len();
            out.resize(start + cats.len(), 0.0);
            if let Ok(pos) = cats.binary_search(v) {
                out[start + pos] = 1.0;
            }
        }
        out.push(1.0);
        out
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}
