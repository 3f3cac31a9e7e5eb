//! CSV ingestion under a plain-text schema descriptor.
//!
//! Descriptor lines are `col,<name>,<numeric|categorical|label>`; blank
//! lines and `#` comments are skipped. The CSV must have a header row; its
//! columns are matched by name and columns absent from the descriptor are
//! ignored.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::Instance;

use super::table::DatasetTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Numeric,
    Categorical,
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDescriptor {
    pub columns: Vec<(String, ColumnRole)>,
}

impl SchemaDescriptor {
    pub fn parse(text: &str) -> Result<Self> {
        let mut columns = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            let err = |message: String| Error::Parse { line: i + 1, message };
            let [tag, name, role] = parts[..] else {
                return Err(err(format!("expected `col,<name>,<kind>`, got `{line}`")));
            };
            if tag != "col" || name.is_empty() {
                return Err(err(format!("expected `col,<name>,<kind>`, got `{line}`")));
            }
            let role = match role {
                "numeric" => ColumnRole::Numeric,
                "categorical" => ColumnRole::Categorical,
                "label" => ColumnRole::Label,
                other => return Err(err(format!("unknown column kind `{other}`"))),
            };
            if columns.iter().any(|(n, _)| n == name) {
                return Err(err(format!("duplicate column `{name}`")));
            }
            columns.push((name.to_string(), role));
        }
        let labels = columns.iter().filter(|(_, r)| *r == ColumnRole::Label).count();
        if labels != 1 {
            return Err(Error::Config(format!("descriptor needs exactly one label column, found {labels}")));
        }
        Ok(Self { columns })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn names(&self, role: ColumnRole) -> Vec<String> {
        self.columns
            .iter()
            .filter(|(_, r)| *r == role)
            .map(|(n, _)| n.clone())
            .collect()
    }
}

fn csv_err(row: usize, column: &str, message: impl Into<String>) -> Error {
    Error::Csv {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Reads rows in file order. Categorical tokens are indexed by first
/// appearance; labels keep their integer value when every label token is
/// an integer and are otherwise indexed in sorted token order.
pub fn load_csv(path: impl AsRef<Path>, descriptor: &SchemaDescriptor) -> Result<DatasetTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(0, "-", e.to_string()))?;
    let header = reader.headers().map_err(|e| csv_err(1, "-", e.to_string()))?.clone();
    let mut index = BTreeMap::new();
    for (name, _) in &descriptor.columns {
        let at = header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| csv_err(1, name, "column missing from header"))?;
        index.insert(name.clone(), at);
    }
    let numeric = descriptor.names(ColumnRole::Numeric);
    let categorical = descriptor.names(ColumnRole::Categorical);
    let label = &descriptor.names(ColumnRole::Label)[0];

    let mut levels: Vec<BTreeMap<String, u32>> = vec![BTreeMap::new(); categorical.len()];
    let mut instances = Vec::new();
    let mut label_tokens = Vec::new();
    for (k, record) in reader.records().enumerate() {
        // header is line 1
        let row = k + 2;
        let record = record.map_err(|e| csv_err(row, "-", e.to_string()))?;
        let field = |name: &str| -> Result<&str> {
            record
                .get(index[name])
                .ok_or_else(|| csv_err(row, name, "missing field"))
        };
        let mut x = Vec::with_capacity(numeric.len());
        for name in &numeric {
            let tok = field(name)?;
            let v: f64 = tok
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| csv_err(row, name, format!("`{tok}` is not a finite number")))?;
            x.push(v);
        }
        let mut c = Vec::with_capacity(categorical.len());
        for (name, lv) in categorical.iter().zip(levels.iter_mut()) {
            let tok = field(name)?;
            let next = lv.len() as u32;
            c.push(*lv.entry(tok.to_string()).or_insert(next));
        }
        instances.push(Instance { numeric: x, categorical: c });
        label_tokens.push(field(label)?.to_string());
    }
    if instances.is_empty() {
        return Err(Error::Degenerate(format!("{}: no data rows", path.display())));
    }
    let labels: Vec<u32> = match label_tokens.iter().map(|t| t.parse::<u32>()).collect::<Result<Vec<_>, _>>() {
        Ok(v) => v,
        Err(_) => {
            let mut distinct: Vec<&String> = label_tokens.iter().collect();
            distinct.sort();
            distinct.dedup();
            label_tokens
                .iter()
                .map(|t| distinct.binary_search(&t).expect("token present") as u32)
                .collect()
        }
    };
    let name = path.file_stem().map_or("csv".into(), |s| s.to_string_lossy().into_owned());
    DatasetTable::new(name, numeric, categorical, instances.into_iter().zip(labels).collect())
}
