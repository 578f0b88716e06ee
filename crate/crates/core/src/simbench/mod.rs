//! Simulation benchmark: data generation, support-recovery metrics, Monte
//! Carlo runs and grids, holdout evaluation of subsets, and probes of how
//! `T+` responds to adding noise features.

mod evaluate;
mod generator;
mod metrics;
mod monotonicity;
mod montecarlo;

use thiserror::Error;

use crate::model::DataError;
use crate::pipeline::PipelineError;

pub use evaluate::{auc, evaluate_split, evaluate_subset, f1_score, Holdout, SubsetEvaluation, SubsetScores};
pub use generator::{generate_dataset, mean_offdiagonal_correlation, SimConfig, SimDataset, MAX_RESPONSE_REDRAWS};
pub use metrics::{selection_metrics, SelectionMetrics};
pub use monotonicity::{
    empirical_l_curve, monotonicity_probe, nested_probe, random_nested_importances, MonotonicityReport, NestedImportances,
};
pub use montecarlo::{
    grid_sweep, monte_carlo_run, replicate_seed, run_replicate, GridResult, GridRow, GridSpec, MetricSummary,
    ReplicateOutcome, GRID_COLUMNS, MAX_FAILURE_FRACTION, REFERENCE_L_GRID, REFERENCE_N_GRID, REFERENCE_RHO_GRID,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("generated response stayed single-class after {attempts} draws")]
    DegenerateResponse { attempts: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{failed} of {total} replicates failed (first: {first_error})")]
    TooManyFailures { failed: usize, total: usize, first_error: String },
    #[error("differences increase at level {level}, replicate {replicate}")]
    DifferencesIncrease { level: usize, replicate: usize },
    #[error("grid has no cells")]
    EmptyGrid,
    #[error("evaluation failed: {0}")]
    Eval(String),
}
