//! The bootstrap loop: resample rows, refit, record importances, and compare
//! each real feature against the per-replicate noise maximum.

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::learners::{fit_importances, LearnerError, LearnerSpec};
use crate::model::{DifferenceSeries, ImportanceError, ImportanceMatrix, TaskKind};
use crate::noise::AugmentedDataset;
use crate::seed::{derive, rng_from, Domain, SeedStream};

/// Redraws allowed for a replicate whose resample has a degenerate response.
pub const MAX_REDRAWS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResampleError {
    #[error("bootstrap replicate {replicate} stayed degenerate after {attempts} draws")]
    DegenerateReplicate { replicate: usize, attempts: usize },
    #[error("learner failed on bootstrap replicate {replicate}: {source}")]
    Learner { replicate: usize, source: LearnerError },
    #[error("plan is for {plan} rows but the dataset has {data}")]
    SizeMismatch { plan: usize, data: usize },
    #[error(transparent)]
    Importance(#[from] ImportanceError),
}

/// Per-replicate seeds derived from one master seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BootstrapPlan {
    sample_size: usize,
    seeds: Vec<u64>,
}

impl BootstrapPlan {
    pub fn new(master_seed: u64, replicate_count: usize, sample_size: usize) -> Self {
        let stream = SeedStream::new(master_seed, Domain::Bootstrap);
        Self { sample_size, seeds: (0..replicate_count as u64).map(|i| stream.at(i)).collect() }
    }

    pub fn replicate_count(&self) -> usize {
        self.seeds.len()
    }

    pub fn sample_size(&self) -> usize {
        self.sample_size
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    /// Seed for the `attempt`-th draw of replicate `i`; attempt 0 is the planned seed.
    pub fn attempt_seed(&self, i: usize, attempt: usize) -> u64 {
        match attempt {
            0 => self.seeds[i],
            a => derive(self.seeds[i], Domain::Redraw, a as u64),
        }
    }
}

/// `n` indices drawn uniformly with replacement from `0..n`.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn degenerate(y: &[f64], task: TaskKind) -> bool {
    let first = y[0];
    match task {
        TaskKind::BinaryClassification => y.iter().all(|&v| v == first),
        TaskKind::Regression => y.iter().all(|&v| v == first),
    }
}

/// Fits `spec` on every planned replicate. Rows come back in plan order, so
/// the result does not depend on the size of the worker pool.
pub fn replicate_importances(
    aug: &AugmentedDataset,
    spec: &LearnerSpec,
    plan: &BootstrapPlan,
) -> Result<ImportanceMatrix, ResampleError> {
    let n = aug.base().n();
    if plan.sample_size() != n {
        return Err(ResampleError::SizeMismatch { plan: plan.sample_size(), data: n });
    }
    let p = aug.base().p();
    let task = aug.base().task();

    let rows: Vec<Result<Vec<f64>, ResampleError>> = (0..plan.replicate_count())
        .into_par_iter()
        .map(|i| {
            for attempt in 0..=MAX_REDRAWS {
                let seed = plan.attempt_seed(i, attempt);
                let idx = bootstrap_indices(n, seed);
                let (cols, y) = aug.gather_rows(&idx);
                if degenerate(&y, task) {
                    continue;
                }
                let learner_seed = derive(seed, Domain::Learner, 0);
                return fit_importances(&cols, &y, task, spec, learner_seed)
                    .map(|v| v.into_values())
                    .map_err(|source| ResampleError::Learner { replicate: i, source });
            }
            Err(ResampleError::DegenerateReplicate { replicate: i, attempts: MAX_REDRAWS + 1 })
        })
        .collect();

    let mut real = Vec::with_capacity(rows.len());
    let mut noise = Vec::with_capacity(rows.len());
    for row in rows {
        let mut row = row?;
        noise.push(row.split_off(p));
        real.push(row);
    }
    Ok(ImportanceMatrix::from_rows(real, noise)?)
}

/// Row-wise maximum of the noise block.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMaxSeries {
    pub values: Vec<f64>,
}

pub fn noise_max(imp: &ImportanceMatrix) -> NoiseMaxSeries {
    let values = imp.noise_rows().iter().map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max)).collect();
    NoiseMaxSeries { values }
}

pub fn paired_differences(imp: &ImportanceMatrix, j: usize) -> DifferenceSeries {
    assert!(j < imp.feature_count(), "feature index {j} out of range");
    let max = noise_max(imp);
    let diffs = imp.real_rows().iter().zip(&max.values).map(|(r, m)| r[j] - m).collect();
    DifferenceSeries { feature_index: j, diffs }
}
