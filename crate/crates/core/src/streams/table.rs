//! Row tables with raw (possibly multiclass) integer labels.

use crate::distribution::{FiniteDistribution, Provenance, Sample};
use crate::error::{Error, Result};
use crate::types::{Instance, Label, Schema};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetTable {
    pub name: String,
    pub numeric_names: Vec<String>,
    pub categorical_names: Vec<String>,
    pub rows: Vec<(Instance, u32)>,
}

impl DatasetTable {
    pub fn new(
        name: impl Into<String>,
        numeric_names: Vec<String>,
        categorical_names: Vec<String>,
        rows: Vec<(Instance, u32)>,
    ) -> Result<Self> {
        let schema = Schema::new(numeric_names.len(), categorical_names.len());
        for (x, _) in &rows {
            schema.check(x)?;
        }
        Ok(Self {
            name: name.into(),
            numeric_names,
            categorical_names,
            rows,
        })
    }

    pub fn schema(&self) -> Schema {
        Schema::new(self.numeric_names.len(), self.categorical_names.len())
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct raw labels with their counts, ascending by label.
    pub fn label_counts(&self) -> Vec<(u32, usize)> {
        let mut counts = std::collections::BTreeMap::new();
        for (_, y) in &self.rows {
            *counts.entry(*y).or_insert(0) += 1;
        }
        counts.into_iter().collect()
    }

    pub fn is_binary(&self) -> bool {
        self.rows.iter().all(|(_, y)| *y <= 1)
    }

    /// The rows as a labelled sample; labels must already be binary.
    pub fn to_sample(&self) -> Result<Sample> {
        let points = self
            .rows
            .iter()
            .map(|(x, y)| {
                Label::new(u8::try_from(*y).unwrap_or(u8::MAX))
                    .map(|l| (x.clone(), l))
                    .map_err(|_| Error::Domain(format!("raw label {y} is not binary; binarize first")))
            })
            .collect::<Result<_>>()?;
        Sample::new(
            points,
            Provenance {
                window: self.name.clone(),
                seed: 0,
            },
        )
    }

    /// Uniform empirical distribution over the rows (binary labels).
    pub fn empirical(&self) -> Result<FiniteDistribution> {
        FiniteDistribution::uniform(self.to_sample()?.points)
    }

    pub(crate) fn with_rows(&self, rows: Vec<(Instance, u32)>) -> Self {
        Self {
            name: self.name.clone(),
            numeric_names: self.numeric_names.clone(),
            categorical_names: self.categorical_names.clone(),
            rows,
        }
    }
}
