//! BUPA liver-disorders ingestion, min-max normalization and seeded splits.
//!
//! The UCI file has no header and seven comma-separated numeric fields per
//! line: `mcv, alkphos, sgpt, sgot, gammagt, drinks, selector`. The first six
//! are inputs and the seventh is used as the regression target.

use std::fmt::Write;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sampling::seeded;

pub const BUPA_FIELDS: usize = 7;
pub const BUPA_FEATURE_NAMES: [&str; 6] = ["mcv", "alkphos", "sgpt", "sgot", "gammagt", "drinks"];

#[derive(Debug, Error, PartialEq)]
pub enum DataError {
    #[error("input contains no samples")]
    Empty,
    #[error("line {line}: expected {expected} fields, found {found}")]
    Arity {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: field {field} is not a finite number: {token:?}")]
    NotNumeric {
        line: usize,
        field: usize,
        token: String,
    },
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot split {n} samples into two non-empty partitions")]
    TooFewSamples { n: usize },
    #[error("features and targets disagree: {rows} rows vs {targets} targets")]
    Shape { rows: usize, targets: usize },
}

/// Per-column `(min, max)` recorded by [`normalize`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
    /// Constant column; its normalized values are all zero.
    pub degenerate: bool,
}

impl ColumnRange {
    fn span(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    /// Row-major: one inner vector per sample.
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
    #[serde(default)]
    pub normalization: Option<Vec<ColumnRange>>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>) -> Result<Self, DataError> {
        if features.len() != targets.len() {
            return Err(DataError::Shape {
                rows: features.len(),
                targets: targets.len(),
            });
        }
        if features.is_empty() {
            return Err(DataError::Empty);
        }
        let width = features[0].len();
        if let Some((i, row)) = features.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(DataError::Arity {
                line: i + 1,
                expected: width + 1,
                found: row.len() + 1,
            });
        }
        Ok(Dataset {
            features,
            targets,
            normalization: None,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.targets.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Rows selected by `indices`, in that order. Normalization metadata is kept.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            targets: indices.iter().map(|&i| self.targets[i]).collect(),
            normalization: self.normalization.clone(),
        }
    }

    /// Comma-separated rendering with the target as the last field. Floats use
    /// Rust's shortest round-trip formatting, so parsing the output recovers
    /// the values exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (row, t) in self.features.iter().zip(&self.targets) {
            for v in row {
                write!(out, "{v},").unwrap();
            }
            writeln!(out, "{t}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Parses the UCI BUPA file: exactly seven numeric fields per line.
pub fn parse_bupa(raw: &str) -> Result<Dataset, DataError> {
    parse_rows(raw, Some(BUPA_FIELDS))
}

/// Generic comma-separated table whose last column is the target. Every line
/// must have the same number of fields (at least two).
pub fn parse_last_column_target(raw: &str) -> Result<Dataset, DataError> {
    parse_rows(raw, None)
}

fn parse_rows(raw: &str, arity: Option<usize>) -> Result<Dataset, DataError> {
    let mut expected = arity;
    let mut features = Vec::new();
    let mut targets = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split(',').map(str::trim).collect();
        let want = *expected.get_or_insert(tokens.len().max(2));
        if tokens.len() != want {
            return Err(DataError::Arity {
                line: line_no,
                expected: want,
                found: tokens.len(),
            });
        }
        let mut values = Vec::with_capacity(want);
        for (field, tok) in tokens.iter().enumerate() {
            match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => values.push(v),
                _ => {
                    return Err(DataError::NotNumeric {
                        line: line_no,
                        field: field + 1,
                        token: tok.to_string(),
                    })
                }
            }
        }
        targets.push(values.pop().expect("arity >= 2"));
        features.push(values);
    }
    if targets.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(Dataset {
        features,
        targets,
        normalization: None,
    })
}

/// Min-max scales every feature column to `[0, 1]`; targets are untouched.
///
/// A constant column maps to zeros and is marked degenerate. Normalizing an
/// already-normalized dataset leaves the values alone and composes the
/// recorded ranges, so [`denormalize`] still recovers the raw data.
pub fn normalize(ds: &Dataset) -> Dataset {
    let n_cols = ds.n_features();
    let mut ranges = Vec::with_capacity(n_cols);
    for j in 0..n_cols {
        let (min, max) = ds
            .features
            .iter()
            .map(|r| r[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        ranges.push(ColumnRange {
            min,
            max,
            degenerate: !(max > min),
        });
    }
    let features = ds
        .features
        .iter()
        .map(|row| {
            row.iter()
                .zip(&ranges)
                .map(|(&v, r)| if r.degenerate { 0.0 } else { ((v - r.min) / r.span()).clamp(0.0, 1.0) })
                .collect()
        })
        .collect();
    let normalization = match &ds.normalization {
        None => ranges,
        Some(prev) => prev
            .iter()
            .zip(&ranges)
            .map(|(p, r)| ColumnRange {
                min: p.min + p.span() * r.min,
                max: p.min + p.span() * r.max,
                degenerate: p.degenerate || r.degenerate,
            })
            .collect(),
    };
    Dataset {
        features,
        targets: ds.targets.clone(),
        normalization: Some(normalization),
    }
}

/// Inverse of [`normalize`]; a dataset without metadata is returned unchanged.
pub fn denormalize(ds: &Dataset) -> Dataset {
    let Some(ranges) = &ds.normalization else {
        return ds.clone();
    };
    let features = ds
        .features
        .iter()
        .map(|row| {
            row.iter()
                .zip(ranges)
                .map(|(&v, r)| if r.degenerate { r.min } else { r.min + v * r.span() })
                .collect()
        })
        .collect();
    Dataset {
        features,
        targets: ds.targets.clone(),
        normalization: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.7,
            seed: 0,
        }
    }
}

/// Shuffled `(train, test)` row indices. Train size is `floor(fraction * n)`,
/// then nudged so both partitions keep at least one sample.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(DataError::BadFraction(spec.train_fraction));
    }
    if n < 2 {
        return Err(DataError::TooFewSamples { n });
    }
    let n_train = ((spec.train_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded(spec.seed));
    let test = order.split_off(n_train);
    Ok((order, test))
}

pub fn split(ds: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DataError> {
    if ds.is_empty() {
        return Err(DataError::Empty);
    }
    let (train, test) = split_indices(ds.n_samples(), spec)?;
    Ok((ds.subset(&train), ds.subset(&test)))
}
