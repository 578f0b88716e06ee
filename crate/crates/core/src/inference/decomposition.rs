use serde::{Deserialize, Serialize};

use super::wsr::mid_ranks;
use super::InferenceError;

/// Both sides of `T+ = p(p+1)/2 + #{(i, j) in P x N : |D_i| > |D_j|}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// Rank-sum side.
    pub t_plus: u64,
    pub positives: u64,
    pub negatives: u64,
    /// `p(p+1)/2`.
    pub baseline: u64,
    /// Positive-over-negative magnitude wins.
    pub pn_wins: u64,
    pub holds: bool,
}

impl DecompositionReport {
    pub fn rhs(&self) -> u64 {
        self.baseline + self.pn_wins
    }
}

/// Evaluates both sides of the signed-rank decomposition. Requires nonzero
/// differences with distinct magnitudes.
pub fn decomposition_check(diffs: &[f64]) -> Result<DecompositionReport, InferenceError> {
    if let Some(index) = diffs.iter().position(|d| *d == 0.0 || !d.is_finite()) {
        return Err(InferenceError::ZeroDifference { index });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = mid_ranks(&abs);
    if !ties.is_empty() {
        return Err(InferenceError::TiesPresent);
    }

    // Without ties every rank is an integer.
    let t_plus: u64 = ranks.iter().zip(diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| *r as u64).sum();

    let pos: Vec<f64> = diffs.iter().filter(|d| **d > 0.0).map(|d| d.abs()).collect();
    let neg: Vec<f64> = diffs.iter().filter(|d| **d < 0.0).map(|d| d.abs()).collect();
    let p = pos.len() as u64;
    let baseline = p * (p + 1) / 2;
    let pn_wins = pos.iter().map(|a| neg.iter().filter(|b| a > b).count() as u64).sum();
    let holds = t_plus == baseline + pn_wins;
    Ok(DecompositionReport { t_plus, positives: p, negatives: neg.len() as u64, baseline, pn_wins, holds })
}
