use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::inference::mid_ranks;
use crate::learners::{fit, LearnerSpec};
use crate::model::{Dataset, TaskKind};
use crate::seed::{derive, rng_from, Domain};

use super::SimError;

/// Seeded random train/test split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Holdout {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for Holdout {
    fn default() -> Self {
        Self { train_fraction: 0.7, seed: 0 }
    }
}

impl Holdout {
    /// `(train_rows, test_rows)`; both nonempty.
    pub fn split(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>), SimError> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) || n < 2 {
            return Err(SimError::Eval(format!("cannot split {n} rows at fraction {}", self.train_fraction)));
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng_from(derive(self.seed, Domain::Holdout, 0)));
        let n_train = ((n as f64 * self.train_fraction).round() as usize).clamp(1, n - 1);
        let test = idx.split_off(n_train);
        Ok((idx, test))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum SubsetScores {
    Classification { f1: f64, auc: f64 },
    Regression { rmse: f64, r2: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetEvaluation {
    pub scores: SubsetScores,
    /// No columns were selected; a constant predictor was scored instead.
    pub constant_predictor: bool,
    pub n_train: usize,
    pub n_test: usize,
}

/// Area under the ROC curve via the Mann-Whitney statistic; tied scores count one half.
pub fn auc(scores: &[f64], labels: &[f64]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let pos = labels.iter().filter(|y| **y == 1.0).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let (ranks, _) = mid_ranks(scores);
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, y)| **y == 1.0).map(|(r, _)| r).sum();
    let (p, q) = (pos as f64, neg as f64);
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// F1 of the positive class with predictions `score >= 0.5`.
pub fn f1_score(scores: &[f64], labels: &[f64]) -> f64 {
    let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
    for (s, y) in scores.iter().zip(labels) {
        match (*s >= 0.5, *y == 1.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            _ => {}
        }
    }
    let denom = 2 * tp + fp + fn_;
    if denom == 0 { 0.0 } else { 2.0 * tp as f64 / denom as f64 }
}

fn regression_scores(pred: &[f64], y: &[f64]) -> SubsetScores {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sse: f64 = pred.iter().zip(y).map(|(p, t)| (p - t) * (p - t)).sum();
    let sst: f64 = y.iter().map(|t| (t - mean) * (t - mean)).sum();
    SubsetScores::Regression { rmse: (sse / n).sqrt(), r2: if sst > 0.0 { 1.0 - sse / sst } else { 0.0 } }
}

/// Trains `learner` on the selected columns of `train` and scores `test`.
pub fn evaluate_split(
    train: &Dataset,
    test: &Dataset,
    selected: &[usize],
    learner: &LearnerSpec,
    seed: u64,
) -> Result<SubsetEvaluation, SimError> {
    let task = train.task();
    let y_test = test.response();
    let constant_predictor = selected.is_empty();
    let pred: Vec<f64> = if constant_predictor {
        let mean = train.response().iter().sum::<f64>() / train.n() as f64;
        vec![mean; test.n()]
    } else {
        let pick = |d: &Dataset| selected.iter().map(|&j| d.column(j).to_vec()).collect::<Vec<_>>();
        let model = fit(&pick(train), train.response(), task, learner, seed)
            .map_err(|e| SimError::Eval(e.to_string()))?;
        model.predict(&pick(test)).map_err(|e| SimError::Eval(e.to_string()))?
    };
    let scores = match task {
        TaskKind::BinaryClassification => SubsetScores::Classification {
            f1: f1_score(&pred, y_test),
            auc: auc(&pred, y_test).ok_or_else(|| SimError::Eval("test split has a single class".into()))?,
        },
        TaskKind::Regression => regression_scores(&pred, y_test),
    };
    Ok(SubsetEvaluation { scores, constant_predictor, n_train: train.n(), n_test: test.n() })
}

/// Seeded holdout evaluation of a feature subset.
pub fn evaluate_subset(
    data: &Dataset,
    selected: &[usize],
    learner: &LearnerSpec,
    holdout: Holdout,
) -> Result<SubsetEvaluation, SimError> {
    if let Some(&j) = selected.iter().find(|&&j| j >= data.p()) {
        return Err(SimError::Eval(format!("selected column {j} out of range")));
    }
    let (train_rows, test_rows) = holdout.split(data.n())?;
    let train = data.select_rows(&train_rows).map_err(|e| SimError::Eval(format!("training split: {e}")))?;
    let test = data.select_rows(&test_rows).map_err(|e| SimError::Eval(format!("test split: {e}")))?;
    evaluate_split(&train, &test, selected, learner, derive(holdout.seed, Domain::Learner, 0))
}
