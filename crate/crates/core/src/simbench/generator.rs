use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::model::{Dataset, TaskKind};
use crate::learners::sigmoid;
use crate::seed::{Domain, SeedStream};

use super::SimError;

/// Response redraws allowed when a generated label vector has a single class.
pub const MAX_RESPONSE_REDRAWS: usize = 10;

/// Compound-symmetric logistic simulation design. The first `k` features carry signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub rho: f64,
    pub coef_low: f64,
    pub coef_high: f64,
    /// Monte Carlo repetitions per cell.
    pub replicates: usize,
    pub master_seed: u64,
    /// Draw fresh coefficients for every replicate; otherwise once per master seed.
    pub redraw_beta: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { n: 1000, p: 50, k: 20, rho: 0.0, coef_low: -2.0, coef_high: 2.0, replicates: 30, master_seed: 0, redraw_beta: true }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        if self.k > self.p {
            return bad(format!("need k <= p, got k={} p={}", self.k, self.p));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [0, 1], got {}", self.rho));
        }
        if !(self.coef_low < self.coef_high) || !self.coef_low.is_finite() || !self.coef_high.is_finite() {
            return bad(format!("need coef_low < coef_high, got [{}, {}]", self.coef_low, self.coef_high));
        }
        if self.replicates == 0 {
            return bad("replicates must be positive".into());
        }
        Ok(())
    }

    /// All features identical within a row; support recovery is ill-posed.
    pub fn is_degenerate(&self) -> bool {
        self.rho >= 1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimDataset {
    pub data: Dataset,
    pub support: Vec<bool>,
    pub beta: Vec<f64>,
}

/// `X_i = sqrt(1 - rho) Z_i + sqrt(rho) C_i 1`, with `Z_i ~ N(0, I_p)` and a
/// per-row latent `C_i ~ N(0, 1)`; `Y_i ~ Bernoulli(sigmoid(X_i' beta))`.
pub fn generate_dataset(cfg: &SimConfig, seed: u64) -> Result<SimDataset, SimError> {
    cfg.validate()?;
    let stream = SeedStream::new(seed, Domain::Simulation);
    let (n, p) = (cfg.n, cfg.p);
    let (a, c) = ((1.0 - cfg.rho).sqrt(), cfg.rho.sqrt());

    let mut rng = stream.rng(0);
    let mut columns = vec![Vec::with_capacity(n); p];
    for _ in 0..n {
        let latent: f64 = rng.sample(StandardNormal);
        for col in columns.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            col.push(a * z + c * latent);
        }
    }

    let beta_seed = if cfg.redraw_beta { seed } else { cfg.master_seed };
    let mut beta_rng = SeedStream::new(beta_seed, Domain::Simulation).rng(1);
    let beta: Vec<f64> = (0..p)
        .map(|j| if j < cfg.k { beta_rng.random_range(cfg.coef_low..cfg.coef_high) } else { 0.0 })
        .collect();

    let prob: Vec<f64> = (0..n)
        .map(|i| sigmoid(columns.iter().zip(&beta).map(|(col, b)| col[i] * b).sum()))
        .collect();
    let names: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    for attempt in 0..=MAX_RESPONSE_REDRAWS {
        let mut yr = stream.rng(2 + attempt as u64);
        let y: Vec<f64> = prob.iter().map(|&pr| if yr.random::<f64>() < pr { 1.0 } else { 0.0 }).collect();
        let ones = y.iter().filter(|v| **v == 1.0).count();
        if ones == 0 || ones == n {
            continue;
        }
        let data = Dataset::new(names, columns, y, TaskKind::BinaryClassification)?;
        let support = (0..p).map(|j| j < cfg.k).collect();
        return Ok(SimDataset { data, support, beta });
    }
    Err(SimError::DegenerateResponse { attempts: MAX_RESPONSE_REDRAWS + 1 })
}

/// Mean Pearson correlation over all feature pairs.
pub fn mean_offdiagonal_correlation(data: &Dataset) -> f64 {
    let cols: Vec<Vec<f64>> = data
        .columns()
        .iter()
        .map(|c| {
            let n = c.len() as f64;
            let m = c.iter().sum::<f64>() / n;
            let sd = (c.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
            c.iter().map(|v| (v - m) / sd).collect()
        })
        .collect();
    let n = data.n() as f64;
    let mut total = 0.0;
    let mut pairs = 0usize;
    for a in 0..cols.len() {
        for b in (a + 1)..cols.len() {
            total += cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum::<f64>() / n;
            pairs += 1;
        }
    }
    total / pairs.max(1) as f64
}
