use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::NabfsConfig;
use crate::pipeline::nabfs_select;
use crate::seed::{derive, Domain};

use super::generator::{generate_dataset, SimConfig};
use super::metrics::{selection_metrics, SelectionMetrics};
use super::SimError;

/// A run aborts when more than this fraction of replicates fail.
pub const MAX_FAILURE_FRACTION: f64 = 0.2;

/// The correlation levels of the reference simulation grid.
pub const REFERENCE_RHO_GRID: [f64; 12] = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.5, 0.6, 0.8, 0.9, 1.0];
/// Probe counts of the reference grid.
pub const REFERENCE_L_GRID: [usize; 7] = [1, 2, 3, 4, 5, 6, 7];
/// Sample sizes of the reference grid.
pub const REFERENCE_N_GRID: [usize; 3] = [500, 1000, 3000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateOutcome {
    pub replicate: usize,
    pub seed: u64,
    pub metrics: SelectionMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub power: f64,
    pub type1: f64,
    pub jaccard: f64,
    pub selected_count: f64,
    pub se_power: f64,
    pub se_type1: f64,
    pub se_jaccard: f64,
    /// Replicates that completed.
    pub replicates: usize,
    pub failed: usize,
    pub per_replicate: Vec<ReplicateOutcome>,
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

impl MetricSummary {
    pub fn from_outcomes(per_replicate: Vec<ReplicateOutcome>, failed: usize) -> Self {
        let col = |f: fn(&SelectionMetrics) -> f64| per_replicate.iter().map(|o| f(&o.metrics)).collect::<Vec<_>>();
        let (power, se_power) = mean_se(&col(|m| m.power));
        let (type1, se_type1) = mean_se(&col(|m| m.type1));
        let (jaccard, se_jaccard) = mean_se(&col(|m| m.jaccard));
        let (selected_count, _) = mean_se(&col(|m| m.selected_count as f64));
        Self {
            power,
            type1,
            jaccard,
            selected_count,
            se_power,
            se_type1,
            se_jaccard,
            replicates: per_replicate.len(),
            failed,
            per_replicate,
        }
    }
}

/// Seed of Monte Carlo replicate `r`; a pure function of the master seed and `r`.
pub fn replicate_seed(master_seed: u64, r: usize) -> u64 {
    derive(master_seed, Domain::MonteCarlo, r as u64)
}

/// One replicate: generate a dataset, select, score against the true support.
pub fn run_replicate(sim: &SimConfig, nabfs: &NabfsConfig, r: usize) -> Result<ReplicateOutcome, SimError> {
    let seed = replicate_seed(sim.master_seed, r);
    let generated = generate_dataset(sim, seed)?;
    let cfg = NabfsConfig { seed: derive(seed, Domain::Selection, 0), ..nabfs.clone() };
    let report = nabfs_select(&generated.data, &cfg)?;
    let metrics = selection_metrics(&report.selected_mask(), &generated.support);
    Ok(ReplicateOutcome { replicate: r, seed, metrics })
}

pub fn monte_carlo_run(sim: &SimConfig, nabfs: &NabfsConfig) -> Result<MetricSummary, SimError> {
    sim.validate()?;
    nabfs.validate().map_err(|e| SimError::Config(e.to_string()))?;
    let results: Vec<Result<ReplicateOutcome, SimError>> =
        (0..sim.replicates).into_par_iter().map(|r| run_replicate(sim, nabfs, r)).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut first_error = None;
    let mut failed = 0;
    for res in results {
        match res {
            Ok(o) => ok.push(o),
            Err(e) => {
                failed += 1;
                first_error.get_or_insert(e.to_string());
            }
        }
    }
    if ok.is_empty() || failed as f64 > MAX_FAILURE_FRACTION * sim.replicates as f64 {
        return Err(SimError::TooManyFailures {
            failed,
            total: sim.replicates,
            first_error: first_error.unwrap_or_default(),
        });
    }
    Ok(MetricSummary::from_outcomes(ok, failed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub ns: Vec<usize>,
    pub rhos: Vec<f64>,
    pub ls: Vec<usize>,
}

impl GridSpec {
    pub fn reference() -> Self {
        Self { ns: REFERENCE_N_GRID.to_vec(), rhos: REFERENCE_RHO_GRID.to_vec(), ls: REFERENCE_L_GRID.to_vec() }
    }

    pub fn cells(&self) -> Vec<(usize, f64, usize)> {
        let mut out = Vec::with_capacity(self.ns.len() * self.rhos.len() * self.ls.len());
        for &n in &self.ns {
            for &rho in &self.rhos {
                for &l in &self.ls {
                    out.push((n, rho, l));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub rho: f64,
    pub l: usize,
    pub seed: u64,
    pub degenerate: bool,
    pub summary: Option<MetricSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub rows: Vec<GridRow>,
}

pub const GRID_COLUMNS: [&str; 13] =
    ["n", "p", "k", "rho", "l", "power", "type1", "jaccard", "se_power", "se_type1", "se_jaccard", "replicates", "seed"];

impl GridResult {
    /// Flat table with a header row. Failed cells carry `NA` metrics.
    pub fn to_delimited(&self, delimiter: char) -> String {
        let d = delimiter.to_string();
        let mut out = GRID_COLUMNS.join(&d);
        out.push('\n');
        for r in &self.rows {
            let metrics: Vec<String> = match &r.summary {
                Some(s) => [s.power, s.type1, s.jaccard, s.se_power, s.se_type1, s.se_jaccard]
                    .iter()
                    .map(|v| format!("{v:.6}"))
                    .chain(std::iter::once(s.replicates.to_string()))
                    .collect(),
                None => vec!["NA".into(); 6].into_iter().chain(std::iter::once("0".to_string())).collect(),
            };
            let _ = writeln!(out, "{}{d}{}{d}{}{d}{}{d}{}{d}{}{d}{}", r.n, r.p, r.k, r.rho, r.l, metrics.join(&d), r.seed);
        }
        out
    }
}

/// Every cell shares the master seed, so cells differing only in `l` see the
/// same datasets, bootstrap rows and nested probe columns.
pub fn grid_sweep(grid: &GridSpec, sim: &SimConfig, nabfs: &NabfsConfig) -> Result<GridResult, SimError> {
    let cells = grid.cells();
    if cells.is_empty() {
        return Err(SimError::EmptyGrid);
    }
    let rows = cells
        .into_par_iter()
        .map(|(n, rho, l)| {
            let cell_sim = SimConfig { n, rho, ..sim.clone() };
            let cell_cfg = NabfsConfig { noise_count: l, ..nabfs.clone() };
            let (summary, error) = match monte_carlo_run(&cell_sim, &cell_cfg) {
                Ok(s) => (Some(s), None),
                Err(e) => (None, Some(e.to_string())),
            };
            GridRow {
                n,
                p: sim.p,
                k: sim.k,
                rho,
                l,
                seed: sim.master_seed,
                degenerate: cell_sim.is_degenerate(),
                summary,
                error,
            }
        })
        .collect();
    Ok(GridResult { rows })
}
