use serde::{Deserialize, Serialize};

/// Support-recovery metrics of one selection against the true support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionMetrics {
    /// `|S ∩ T| / |T|`; 1 when `T` is empty.
    pub power: f64,
    /// `|S ∖ T| / |Tᶜ|`; 0 when every feature is a true signal.
    pub type1: f64,
    /// `|S ∩ T| / |S ∪ T|`; 1 when both are empty.
    pub jaccard: f64,
    pub selected_count: usize,
}

pub fn selection_metrics(selected: &[bool], truth: &[bool]) -> SelectionMetrics {
    assert_eq!(selected.len(), truth.len(), "selection and truth masks differ in length");
    let (mut tp, mut fp, mut k) = (0usize, 0usize, 0usize);
    for (&s, &t) in selected.iter().zip(truth) {
        k += t as usize;
        match (s, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            _ => {}
        }
    }
    let nulls = truth.len() - k;
    let union = k + fp;
    SelectionMetrics {
        power: if k == 0 { 1.0 } else { tp as f64 / k as f64 },
        type1: if nulls == 0 { 0.0 } else { fp as f64 / nulls as f64 },
        jaccard: if union == 0 { 1.0 } else { tp as f64 / union as f64 },
        selected_count: tp + fp,
    }
}
