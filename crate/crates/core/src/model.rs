//! Shared domain types: datasets, run configuration and bootstrap importances.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learners::LearnerSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    BinaryClassification,
    Regression,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::BinaryClassification => "binary_classification",
            TaskKind::Regression => "regression",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },
    #[error("non-finite response at row {row}")]
    NonFiniteResponse { row: usize },
    #[error("duplicate feature name `{0}`")]
    DuplicateFeatureName(String),
    #[error("degenerate response: {0}")]
    DegenerateResponse(&'static str),
    #[error("binary response must be 0 or 1, found {value} at row {row}")]
    NonBinaryResponse { row: usize, value: f64 },
    #[error("need at least 2 rows, found {0}")]
    TooFewRows(usize),
    #[error("need at least one feature")]
    NoFeatures,
    #[error("column {col} has {found} rows, expected {expected}")]
    RaggedColumn { col: usize, expected: usize, found: usize },
    #[error("{names} feature names for {cols} columns")]
    NameCountMismatch { names: usize, cols: usize },
}

/// Unvalidated dataset as assembled by a reader or generator.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub feature_names: Vec<String>,
    /// Column-major: `columns[j][i]` is row `i` of feature `j`.
    pub columns: Vec<Vec<f64>>,
    pub response: Vec<f64>,
    pub task: TaskKind,
}

/// A validated, immutable design matrix with a response column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    feature_names: Vec<String>,
    columns: Vec<Vec<f64>>,
    response: Vec<f64>,
    task: TaskKind,
}

pub fn validate_dataset(raw: RawDataset) -> Result<Dataset, DataError> {
    let RawDataset { feature_names, columns, response, task } = raw;
    let n = response.len();
    if n < 2 {
        return Err(DataError::TooFewRows(n));
    }
    if columns.is_empty() {
        return Err(DataError::NoFeatures);
    }
    if feature_names.len() != columns.len() {
        return Err(DataError::NameCountMismatch { names: feature_names.len(), cols: columns.len() });
    }
    for (col, c) in columns.iter().enumerate() {
        if c.len() != n {
            return Err(DataError::RaggedColumn { col, expected: n, found: c.len() });
        }
    }
    // Report the first offending cell in row-major order, as a reader would see it.
    for row in 0..n {
        for (col, c) in columns.iter().enumerate() {
            if !c[row].is_finite() {
                return Err(DataError::NonFiniteValue { row, col });
            }
        }
        if !response[row].is_finite() {
            return Err(DataError::NonFiniteResponse { row });
        }
    }
    let mut seen = HashSet::with_capacity(feature_names.len());
    for name in &feature_names {
        if !seen.insert(name.as_str()) {
            return Err(DataError::DuplicateFeatureName(name.clone()));
        }
    }
    match task {
        TaskKind::BinaryClassification => {
            let mut counts = [0usize; 2];
            for (row, &v) in response.iter().enumerate() {
                if v == 0.0 {
                    counts[0] += 1;
                } else if v == 1.0 {
                    counts[1] += 1;
                } else {
                    return Err(DataError::NonBinaryResponse { row, value: v });
                }
            }
            if counts[0] == 0 || counts[1] == 0 {
                return Err(DataError::DegenerateResponse("single class"));
            }
        }
        TaskKind::Regression => {
            let first = response[0];
            if response.iter().all(|&v| v == first) {
                return Err(DataError::DegenerateResponse("zero variance"));
            }
        }
    }
    Ok(Dataset { feature_names, columns, response, task })
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        columns: Vec<Vec<f64>>,
        response: Vec<f64>,
        task: TaskKind,
    ) -> Result<Self, DataError> {
        validate_dataset(RawDataset { feature_names, columns, response, task })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn p(&self) -> usize {
        self.columns.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn task(&self) -> TaskKind {
        self.task
    }

    pub fn into_raw(self) -> RawDataset {
        RawDataset {
            feature_names: self.feature_names,
            columns: self.columns,
            response: self.response,
            task: self.task,
        }
    }

    /// Keeps the listed columns, in the order given.
    pub fn select_columns(&self, keep: &[usize]) -> Result<Dataset, DataError> {
        validate_dataset(RawDataset {
            feature_names: keep.iter().map(|&j| self.feature_names[j].clone()).collect(),
            columns: keep.iter().map(|&j| self.columns[j].clone()).collect(),
            response: self.response.clone(),
            task: self.task,
        })
    }

    /// Keeps the listed rows, in the order given.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset, DataError> {
        validate_dataset(RawDataset {
            feature_names: self.feature_names.clone(),
            columns: self.columns.iter().map(|c| gather(c, rows)).collect(),
            response: gather(&self.response, rows),
            task: self.task,
        })
    }
}

pub(crate) fn gather(values: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| values[i]).collect()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("noise_count must be at least 1")]
    NoiseCount,
    #[error("bootstrap_count must be at least 2, got {0}")]
    BootstrapCount(usize),
    #[error("alpha must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("noise_sd must be positive and finite, got {0}")]
    NoiseSd(f64),
    #[error("noise_mean must be finite, got {0}")]
    NoiseMean(f64),
    #[error("exact_wsr_max_pairs must be positive")]
    ExactPairs,
    #[error("invalid learner: {0}")]
    Learner(String),
}

/// Hyperparameters of one selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NabfsConfig {
    pub noise_count: usize,
    pub bootstrap_count: usize,
    pub alpha: f64,
    pub noise_mean: f64,
    pub noise_sd: f64,
    pub learner: LearnerSpec,
    pub seed: u64,
    pub exact_wsr_max_pairs: usize,
}

impl Default for NabfsConfig {
    fn default() -> Self {
        Self {
            noise_count: 3,
            bootstrap_count: 100,
            alpha: 0.05,
            noise_mean: 0.0,
            noise_sd: 0.1,
            learner: LearnerSpec::default_logistic(),
            seed: 0,
            exact_wsr_max_pairs: 16,
        }
    }
}

impl NabfsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.noise_count < 1 {
            return Err(ConfigError::NoiseCount);
        }
        if self.bootstrap_count < 2 {
            return Err(ConfigError::BootstrapCount(self.bootstrap_count));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            return Err(ConfigError::NoiseSd(self.noise_sd));
        }
        if !self.noise_mean.is_finite() {
            return Err(ConfigError::NoiseMean(self.noise_mean));
        }
        if self.exact_wsr_max_pairs == 0 {
            return Err(ConfigError::ExactPairs);
        }
        self.learner.validate().map_err(|e| ConfigError::Learner(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ImportanceError {
    #[error("importance at replicate {row}, column {col} is negative or non-finite: {value}")]
    InvalidEntry { row: usize, col: usize, value: f64 },
    #[error("replicate {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, expected: usize, found: usize },
    #[error("real and noise blocks disagree on replicate count ({real} vs {noise})")]
    ReplicateMismatch { real: usize, noise: usize },
    #[error("importance matrix needs at least one replicate, feature and noise column")]
    Empty,
}

/// Bootstrap importances, one row per replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMatrix {
    real: Vec<Vec<f64>>,
    noise: Vec<Vec<f64>>,
}

impl ImportanceMatrix {
    pub fn from_rows(real: Vec<Vec<f64>>, noise: Vec<Vec<f64>>) -> Result<Self, ImportanceError> {
        if real.len() != noise.len() {
            return Err(ImportanceError::ReplicateMismatch { real: real.len(), noise: noise.len() });
        }
        if real.is_empty() || real[0].is_empty() || noise[0].is_empty() {
            return Err(ImportanceError::Empty);
        }
        let (p, l) = (real[0].len(), noise[0].len());
        for (row, (r, z)) in real.iter().zip(&noise).enumerate() {
            if r.len() != p {
                return Err(ImportanceError::RaggedRow { row, expected: p, found: r.len() });
            }
            if z.len() != l {
                return Err(ImportanceError::RaggedRow { row, expected: l, found: z.len() });
            }
            for (col, &value) in r.iter().chain(z).enumerate() {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(ImportanceError::InvalidEntry { row, col, value });
                }
            }
        }
        Ok(Self { real, noise })
    }

    pub fn replicate_count(&self) -> usize {
        self.real.len()
    }

    pub fn feature_count(&self) -> usize {
        self.real[0].len()
    }

    pub fn noise_count(&self) -> usize {
        self.noise[0].len()
    }

    pub fn real_row(&self, i: usize) -> &[f64] {
        &self.real[i]
    }

    pub fn noise_row(&self, i: usize) -> &[f64] {
        &self.noise[i]
    }

    pub fn real_rows(&self) -> &[Vec<f64>] {
        &self.real
    }

    pub fn noise_rows(&self) -> &[Vec<f64>] {
        &self.noise
    }

    pub fn real_column_mean(&self, j: usize) -> f64 {
        self.real.iter().map(|r| r[j]).sum::<f64>() / self.replicate_count() as f64
    }

    pub fn noise_column_mean(&self, k: usize) -> f64 {
        self.noise.iter().map(|r| r[k]).sum::<f64>() / self.replicate_count() as f64
    }
}

/// Per-replicate differences between one feature and the noise maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSeries {
    pub feature_index: usize,
    pub diffs: Vec<f64>,
}
