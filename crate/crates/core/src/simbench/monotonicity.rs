use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::inference::wilcoxon_one_sided;
use crate::model::NabfsConfig;
use crate::seed::rng_from;

use super::generator::SimConfig;
use super::montecarlo::{monte_carlo_run, MetricSummary};
use super::SimError;

/// One feature's importance per replicate plus an ordered pool of probe
/// importances; level `l` uses the first `l` probes.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedImportances {
    pub real: Vec<f64>,
    /// `noise[i][k]`: probe `k` in replicate `i`.
    pub noise: Vec<Vec<f64>>,
}

impl NestedImportances {
    pub fn max_level(&self) -> usize {
        self.noise.first().map_or(0, |r| r.len())
    }

    /// `D_i(l) = I_i - max_{k < l} noise[i][k]` for `l = 1..=max_level`.
    pub fn differences_by_level(&self) -> Vec<Vec<f64>> {
        (1..=self.max_level())
            .map(|l| {
                self.real
                    .iter()
                    .zip(&self.noise)
                    .map(|(r, z)| r - z[..l].iter().copied().fold(f64::NEG_INFINITY, f64::max))
                    .collect()
            })
            .collect()
    }
}

/// Continuous random importances: the real feature and every probe are
/// exponential draws, with the real feature scaled by `signal`.
pub fn random_nested_importances(replicates: usize, levels: usize, signal: f64, seed: u64) -> NestedImportances {
    let mut rng = rng_from(seed);
    let real = (0..replicates).map(|_| signal * rng.sample::<f64, _>(Exp1)).collect();
    let noise = (0..replicates).map(|_| (0..levels).map(|_| rng.sample::<f64, _>(Exp1)).collect()).collect();
    NestedImportances { real, noise }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// `T+` at each level, first level first.
    pub t_plus: Vec<f64>,
    /// Steps where `T+` increased.
    pub violations: usize,
    /// Steps where some positive difference became non-positive.
    pub crossover_steps: usize,
    /// Crossover steps where `T+` dropped by less than one.
    pub crossover_shortfalls: usize,
}

/// Checks `T+` along a sequence of difference vectors that must satisfy
/// `D_i(l+1) <= D_i(l)` for every replicate.
pub fn monotonicity_probe(levels: &[Vec<f64>]) -> Result<MonotonicityReport, SimError> {
    for (l, pair) in levels.windows(2).enumerate() {
        if pair[0].len() != pair[1].len() {
            return Err(SimError::Config(format!("level {} has a different replicate count", l + 2)));
        }
        if let Some(i) = pair[0].iter().zip(&pair[1]).position(|(a, b)| b > a) {
            return Err(SimError::DifferencesIncrease { level: l + 2, replicate: i });
        }
    }
    let t_plus: Vec<f64> = levels.iter().map(|d| wilcoxon_one_sided(d, 0).t_plus).collect();
    let mut report = MonotonicityReport { t_plus: t_plus.clone(), violations: 0, crossover_steps: 0, crossover_shortfalls: 0 };
    for (l, pair) in levels.windows(2).enumerate() {
        let (before, after) = (t_plus[l], t_plus[l + 1]);
        if after > before {
            report.violations += 1;
        }
        let crossed = pair[0].iter().zip(&pair[1]).any(|(a, b)| *a > 0.0 && *b <= 0.0);
        if crossed {
            report.crossover_steps += 1;
            if before - after < 1.0 {
                report.crossover_shortfalls += 1;
            }
        }
    }
    Ok(report)
}

pub fn nested_probe(nested: &NestedImportances) -> Result<MonotonicityReport, SimError> {
    monotonicity_probe(&nested.differences_by_level())
}

/// Monte Carlo power / Type I error at each probe count, common random numbers across levels.
pub fn empirical_l_curve(sim: &SimConfig, nabfs: &NabfsConfig, levels: &[usize]) -> Result<Vec<(usize, MetricSummary)>, SimError> {
    levels
        .iter()
        .map(|&l| monte_carlo_run(sim, &NabfsConfig { noise_count: l, ..nabfs.clone() }).map(|s| (l, s)))
        .collect()
}
