//! Signed-rank testing of per-replicate differences and Holm step-down
//! adjustment across features.

mod decomposition;
mod holm;
mod wsr;

use thiserror::Error;

pub use decomposition::{decomposition_check, DecompositionReport};
pub use holm::{holm_adjust, AdjustedPValues};
pub use wsr::{mid_ranks, normal_sf, wilcoxon_one_sided, wilcoxon_with_null, WsrMethod, WsrNull, WsrResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error("p-value {value} at index {index} is outside [0, 1]")]
    OutOfRangePValue { index: usize, value: f64 },
    #[error("tied magnitudes present")]
    TiesPresent,
    #[error("zero or non-finite difference at index {index}")]
    ZeroDifference { index: usize },
}
