//! Base learners that turn a design matrix into nonnegative per-column importances.
//!
//! * `Logistic` / `Linear`: absolute coefficient on standardized columns.
//! * `Forest`: impurity decrease summed per column, normalized to sum to one.

mod forest;
mod linalg;
mod linear;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::TaskKind;

pub use forest::{Forest, Node, Tree};
pub use linear::{sigmoid, LinearModel, PenalizedLogistic, Standardizer};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },
    #[error("expected {expected} columns, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{learner} learner does not support {task} tasks")]
    UnsupportedTask { learner: &'static str, task: &'static str },
    #[error("invalid learner parameter: {0}")]
    InvalidParameter(String),
    #[error("design matrix is empty or ragged")]
    BadShape,
}

/// How many candidate columns a tree examines at each split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeaturesPerSplit {
    /// `floor(sqrt(m))` of the `m` columns.
    Sqrt,
    /// A fixed fraction in (0, 1].
    Fraction(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    Logistic { l2_penalty: f64, max_iter: usize, tol: f64 },
    Linear { l2_penalty: f64, max_iter: usize, tol: f64 },
    Forest { n_trees: usize, max_depth: usize, min_leaf: usize, features_per_split: FeaturesPerSplit },
}

impl LearnerSpec {
    pub fn default_logistic() -> Self {
        LearnerSpec::Logistic { l2_penalty: 1.0, max_iter: 100, tol: 1e-8 }
    }

    pub fn default_linear() -> Self {
        LearnerSpec::Linear { l2_penalty: 1.0, max_iter: 100, tol: 1e-8 }
    }

    pub fn default_forest() -> Self {
        LearnerSpec::Forest { n_trees: 100, max_depth: 6, min_leaf: 5, features_per_split: FeaturesPerSplit::Sqrt }
    }

    /// Short stable identifier used in reports.
    pub fn id(&self) -> &'static str {
        match self {
            LearnerSpec::Logistic { .. } => "logistic",
            LearnerSpec::Linear { .. } => "linear",
            LearnerSpec::Forest { .. } => "forest",
        }
    }

    /// Whether importances are normalized to sum to one.
    pub fn normalizes(&self) -> bool {
        matches!(self, LearnerSpec::Forest { .. })
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        let bad = |m: &str| Err(LearnerError::InvalidParameter(m.to_string()));
        match *self {
            LearnerSpec::Logistic { l2_penalty, max_iter, tol } | LearnerSpec::Linear { l2_penalty, max_iter, tol } => {
                if !(l2_penalty >= 0.0 && l2_penalty.is_finite()) {
                    return bad("l2_penalty must be nonnegative and finite");
                }
                if max_iter == 0 {
                    return bad("max_iter must be positive");
                }
                if !(tol > 0.0 && tol.is_finite()) {
                    return bad("tol must be positive");
                }
            }
            LearnerSpec::Forest { n_trees, min_leaf, features_per_split, .. } => {
                if n_trees == 0 {
                    return bad("n_trees must be positive");
                }
                if min_leaf == 0 {
                    return bad("min_leaf must be positive");
                }
                if let FeaturesPerSplit::Fraction(f) = features_per_split {
                    if !(f > 0.0 && f <= 1.0) {
                        return bad("features_per_split must lie in (0, 1]");
                    }
                }
            }
        }
        Ok(())
    }

    pub fn check_task(&self, task: TaskKind) -> Result<(), LearnerError> {
        match (self, task) {
            (LearnerSpec::Logistic { .. }, TaskKind::Regression) => {
                Err(LearnerError::UnsupportedTask { learner: "logistic", task: task.as_str() })
            }
            (LearnerSpec::Linear { .. }, TaskKind::BinaryClassification) => {
                Err(LearnerError::UnsupportedTask { learner: "linear", task: task.as_str() })
            }
            _ => Ok(()),
        }
    }
}

/// One nonnegative importance per design column, in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceVector {
    values: Vec<f64>,
}

impl ImportanceVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedModel {
    Logistic(LinearModel),
    Linear(LinearModel),
    Forest { task: TaskKind, forest: Forest },
}

impl FittedModel {
    pub fn n_columns(&self) -> usize {
        match self {
            FittedModel::Logistic(m) | FittedModel::Linear(m) => m.coefficients.len(),
            FittedModel::Forest { forest, .. } => forest.importances.len(),
        }
    }

    pub fn importances(&self) -> ImportanceVector {
        let values = match self {
            FittedModel::Logistic(m) | FittedModel::Linear(m) => m.abs_coefficients(),
            FittedModel::Forest { forest, .. } => forest.importances.clone(),
        };
        ImportanceVector { values }
    }

    /// Probabilities for classification, real-valued predictions for regression.
    pub fn predict(&self, columns: &[Vec<f64>]) -> Result<Vec<f64>, LearnerError> {
        if columns.len() != self.n_columns() {
            return Err(LearnerError::DimensionMismatch { expected: self.n_columns(), found: columns.len() });
        }
        let n = columns.first().map_or(0, |c| c.len());
        if columns.iter().any(|c| c.len() != n) {
            return Err(LearnerError::BadShape);
        }
        Ok(match self {
            FittedModel::Logistic(m) => m.linear_predictor(columns).into_iter().map(sigmoid).collect(),
            FittedModel::Linear(m) => m.linear_predictor(columns),
            FittedModel::Forest { forest, .. } => forest.predict(columns),
        })
    }
}

/// Fits `spec` on column-major `columns` and response `y`. Deterministic in
/// `(columns, y, spec, seed)`.
pub fn fit(columns: &[Vec<f64>], y: &[f64], task: TaskKind, spec: &LearnerSpec, seed: u64) -> Result<FittedModel, LearnerError> {
    spec.validate()?;
    spec.check_task(task)?;
    if columns.is_empty() || y.is_empty() || columns.iter().any(|c| c.len() != y.len()) {
        return Err(LearnerError::BadShape);
    }
    Ok(match *spec {
        LearnerSpec::Logistic { l2_penalty, max_iter, tol } => {
            FittedModel::Logistic(linear::fit_logistic(columns, y, l2_penalty, max_iter, tol)?)
        }
        LearnerSpec::Linear { l2_penalty, max_iter, tol } => {
            FittedModel::Linear(linear::fit_ridge(columns, y, l2_penalty, max_iter, tol)?)
        }
        LearnerSpec::Forest { n_trees, max_depth, min_leaf, features_per_split } => {
            let params = forest::ForestParams { n_trees, max_depth, min_leaf, features_per_split };
            FittedModel::Forest { task, forest: forest::fit_forest(columns, y, task, params, seed) }
        }
    })
}

pub fn fit_importances(
    columns: &[Vec<f64>],
    y: &[f64],
    task: TaskKind,
    spec: &LearnerSpec,
    seed: u64,
) -> Result<ImportanceVector, LearnerError> {
    fit(columns, y, task, spec, seed).map(|m| m.importances())
}
