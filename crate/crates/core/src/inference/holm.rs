use serde::{Deserialize, Serialize};

use super::InferenceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustedPValues {
    pub raw: Vec<f64>,
    pub adjusted: Vec<f64>,
    /// Indices of `raw` in ascending p-value order (stable for ties).
    pub order: Vec<usize>,
}

impl AdjustedPValues {
    /// Rejections at family-wise level `alpha`: exactly `adjusted < alpha`.
    pub fn rejections(&self, alpha: f64) -> Vec<bool> {
        self.adjusted.iter().map(|a| *a < alpha).collect()
    }
}

/// Holm step-down adjustment:
/// `adj_(i) = min(1, max_{j <= i} (m - j + 1) * p_(j))` on the sorted p-values.
pub fn holm_adjust(raw: &[f64]) -> Result<AdjustedPValues, InferenceError> {
    for (index, &value) in raw.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(InferenceError::OutOfRangePValue { index, value });
        }
    }
    let m = raw.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| raw[a].total_cmp(&raw[b]));

    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (pos, &i) in order.iter().enumerate() {
        let scaled = (m - pos) as f64 * raw[i];
        running = running.max(scaled);
        adjusted[i] = running.min(1.0);
    }
    Ok(AdjustedPValues { raw: raw.to_vec(), adjusted, order })
}
