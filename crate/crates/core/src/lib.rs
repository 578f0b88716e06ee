//! Noise-augmented bootstrap feature selection.
//!
//! A dataset is augmented with synthetic Gaussian probe columns, a base
//! learner is refit on bootstrap resamples, and each real feature's
//! importance is compared with the strongest probe of the same replicate.
//! A one-sided Wilcoxon signed-rank test over replicates gives a p-value per
//! feature; Holm's step-down adjustment controls the family-wise error rate.
//!
//! ```no_run
//! use nabfs_core::{nabfs_select, Dataset, NabfsConfig, TaskKind};
//!
//! let data = Dataset::new(
//!     vec!["a".into(), "b".into()],
//!     vec![vec![0.1, 0.9, 0.2, 0.8], vec![1.0, 1.1, 0.9, 1.2]],
//!     vec![0.0, 1.0, 0.0, 1.0],
//!     TaskKind::BinaryClassification,
//! )?;
//! let report = nabfs_select(&data, &NabfsConfig::default())?;
//! println!("{}", report.render_table());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod inference;
pub mod learners;
pub mod model;
pub mod noise;
pub mod pipeline;
pub mod report;
pub mod resampling;
pub mod seed;
pub mod simbench;

pub use learners::{FeaturesPerSplit, LearnerSpec};
pub use model::{validate_dataset, Dataset, NabfsConfig, RawDataset, TaskKind};
pub use pipeline::{naive_threshold_select, nabfs_select, with_workers, PipelineError};
pub use report::{SelectionMethod, SelectionReport};
