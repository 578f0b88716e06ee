use serde::{Deserialize, Serialize};

/// Exact enumeration counts fit in `u128` up to this many pairs.
const EXACT_CEILING: usize = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WsrMethod {
    Exact,
    NormalApprox,
    Degenerate,
}

/// Which null distribution to use for the p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsrNull {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsrResult {
    /// Sum of (mid-)ranks of the positive differences.
    pub t_plus: f64,
    /// Number of nonzero differences.
    pub effective_pairs: usize,
    /// One-sided `P(T+ >= t_plus)` under the sign-symmetric null.
    pub p_value: f64,
    pub method: WsrMethod,
}

/// 1-based ranks of `values` in ascending order, averaging tied groups.
/// Also returns the size of every tie group with more than one member.
pub fn mid_ranks(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = Vec::new();
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end hold ranks start+1..=end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        if end - start > 1 {
            ties.push(end - start);
        }
        start = end;
    }
    (ranks, ties)
}

struct SignedRanks {
    ranks: Vec<f64>,
    positive: Vec<bool>,
    ties: Vec<usize>,
    t_plus: f64,
}

fn signed_ranks(diffs: &[f64]) -> SignedRanks {
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let (ranks, ties) = mid_ranks(&abs);
    let positive: Vec<bool> = nonzero.iter().map(|d| *d > 0.0).collect();
    let t_plus = ranks.iter().zip(&positive).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    SignedRanks { ranks, positive, ties, t_plus }
}

/// One-sided signed-rank test of "differences tend to be positive". Zeros are
/// dropped; the exact null is used for at most `exact_max_pairs` nonzero pairs.
pub fn wilcoxon_one_sided(diffs: &[f64], exact_max_pairs: usize) -> WsrResult {
    let m = diffs.iter().filter(|d| **d != 0.0).count();
    let null = if m <= exact_max_pairs.min(EXACT_CEILING) { WsrNull::Exact } else { WsrNull::Normal };
    wilcoxon_with_null(diffs, null)
}

/// Like [`wilcoxon_one_sided`] with an explicit choice of null. `Exact` falls
/// back to the normal approximation above 120 pairs.
pub fn wilcoxon_with_null(diffs: &[f64], null: WsrNull) -> WsrResult {
    assert!(diffs.iter().all(|d| d.is_finite()), "differences must be finite");
    let sr = signed_ranks(diffs);
    let m = sr.ranks.len();
    if m == 0 {
        return WsrResult { t_plus: 0.0, effective_pairs: 0, p_value: 1.0, method: WsrMethod::Degenerate };
    }
    let (p_value, method) = match null {
        WsrNull::Exact if m <= EXACT_CEILING => (exact_upper_tail(&sr.ranks, sr.t_plus), WsrMethod::Exact),
        _ => (normal_upper_tail(m, &sr.ties, sr.t_plus), WsrMethod::NormalApprox),
    };
    debug_assert_eq!(sr.positive.len(), m);
    WsrResult { t_plus: sr.t_plus, effective_pairs: m, p_value: p_value.clamp(0.0, 1.0), method }
}

/// `P(T+ >= t)` over all `2^m` equally likely sign assignments of `ranks`,
/// counted by subset-sum convolution on doubled (integer) ranks.
fn exact_upper_tail(ranks: &[f64], t_plus: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u128; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let threshold = (2.0 * t_plus).round() as usize;
    let hits: u128 = counts[threshold.min(total + 1)..].iter().sum();
    hits as f64 / (2.0f64).powi(ranks.len() as i32)
}

/// Normal approximation with tie-corrected variance and a 0.5 continuity correction.
fn normal_upper_tail(m: usize, ties: &[usize], t_plus: f64) -> f64 {
    let mf = m as f64;
    let mean = mf * (mf + 1.0) / 4.0;
    let tie_term: f64 = ties.iter().map(|&t| {
        let t = t as f64;
        t * t * t - t
    }).sum::<f64>() / 48.0;
    let var = mf * (mf + 1.0) * (2.0 * mf + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return if t_plus >= mean { 0.5 } else { 1.0 };
    }
    let z = (t_plus - mean - 0.5) / var.sqrt();
    normal_sf(z)
}

/// Standard normal survival function.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / std::f64::consts::SQRT_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute force over every sign pattern.
    fn enumerate(ranks: &[f64], t: f64) -> f64 {
        let m = ranks.len();
        let mut hits = 0u64;
        for mask in 0u64..(1 << m) {
            let s: f64 = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
            if s >= t - 1e-9 {
                hits += 1;
            }
        }
        hits as f64 / (1u64 << m) as f64
    }

    #[test]
    fn three_positive_pairs() {
        let r = wilcoxon_one_sided(&[1.0, 2.0, 3.0], 16);
        assert_eq!(r.t_plus, 6.0);
        assert_eq!(r.p_value, 0.125);
        assert_eq!(r.method, WsrMethod::Exact);
    }

    #[test]
    fn all_negative_pairs() {
        let r = wilcoxon_one_sided(&[-1.0, -2.0, -3.0], 16);
        assert_eq!(r.t_plus, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn mixed_signs() {
        let r = wilcoxon_one_sided(&[3.0, -1.0, 2.0, -4.0], 16);
        assert_eq!(r.t_plus, 5.0);
        assert_eq!(r.p_value, 9.0 / 16.0);
        assert_eq!(r.effective_pairs, 4);
    }

    #[test]
    fn zeros_only_is_degenerate() {
        let r = wilcoxon_one_sided(&[0.0, 0.0, 0.0], 16);
        assert_eq!(r.method, WsrMethod::Degenerate);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.effective_pairs, 0);
        assert_eq!(wilcoxon_one_sided(&[], 16).method, WsrMethod::Degenerate);
    }

    #[test]
    fn zeros_are_dropped_before_ranking() {
        let a = wilcoxon_one_sided(&[0.0, 3.0, -1.0, 0.0, 2.0, -4.0], 16);
        let b = wilcoxon_one_sided(&[3.0, -1.0, 2.0, -4.0], 16);
        assert_eq!(a, b);
    }

    #[test]
    fn mid_ranks_for_ties() {
        let (r, ties) = mid_ranks(&[2.0, 1.0, 2.0, 3.0]);
        assert_eq!(r, vec![2.5, 1.0, 2.5, 4.0]);
        assert_eq!(ties, vec![2]);
    }

    #[test]
    fn exact_with_ties_matches_enumeration() {
        let diffs = [1.0, -1.0, 2.0, 2.0, -2.0, 3.5, 0.5];
        let r = wilcoxon_one_sided(&diffs, 16);
        let abs: Vec<f64> = diffs.iter().map(|d: &f64| d.abs()).collect();
        let (ranks, _) = mid_ranks(&abs);
        assert!((r.p_value - enumerate(&ranks, r.t_plus)).abs() < 1e-12);
    }

    #[test]
    fn threshold_switches_method() {
        let diffs: Vec<f64> = (1..=20).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
        assert_eq!(wilcoxon_one_sided(&diffs, 16).method, WsrMethod::NormalApprox);
        assert_eq!(wilcoxon_one_sided(&diffs, 20).method, WsrMethod::Exact);
    }

    #[test]
    fn normal_sf_reference_values() {
        assert!((normal_sf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_sf(1.959963984540054) - 0.025).abs() < 1e-12);
        assert!((normal_sf(-1.0) - 0.8413447460685429).abs() < 1e-12);
    }
}
