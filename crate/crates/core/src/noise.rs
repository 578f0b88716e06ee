//! Synthetic Gaussian noise probes appended to a dataset.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::Normal;
use thiserror::Error;

use crate::model::Dataset;
use crate::seed::{Domain, SeedStream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error("noise column count must be at least 1")]
    NoNoise,
    #[error("noise sd must be positive and finite, got {0}")]
    BadScale(f64),
    #[error("noise mean must be finite, got {0}")]
    BadMean(f64),
    #[error("cannot name noise column {0}: every candidate name is already a feature")]
    NameCollision(usize),
}

/// A dataset plus `l` probe columns. Real columns are the untouched originals.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedDataset {
    base: Dataset,
    noise_columns: Vec<Vec<f64>>,
    noise_names: Vec<String>,
}

impl AugmentedDataset {
    pub fn base(&self) -> &Dataset {
        &self.base
    }

    pub fn noise_columns(&self) -> &[Vec<f64>] {
        &self.noise_columns
    }

    pub fn noise_names(&self) -> &[String] {
        &self.noise_names
    }

    pub fn noise_count(&self) -> usize {
        self.noise_columns.len()
    }

    pub fn width(&self) -> usize {
        self.base.p() + self.noise_count()
    }

    /// Real columns followed by noise columns.
    pub fn design(&self) -> Vec<&[f64]> {
        self.base.columns().iter().chain(&self.noise_columns).map(|c| c.as_slice()).collect()
    }

    /// The design restricted to `rows` (with repetition), real columns first.
    pub fn gather_rows(&self, rows: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let cols = self.design().into_iter().map(|c| rows.iter().map(|&i| c[i]).collect()).collect();
        let y = rows.iter().map(|&i| self.base.response()[i]).collect();
        (cols, y)
    }

    pub fn full_design(&self) -> Vec<Vec<f64>> {
        self.design().into_iter().map(|c| c.to_vec()).collect()
    }
}

/// Draws probe column `k` for `n` rows. Column `k` depends only on `(seed, k, n)`,
/// so the first `l` columns of an `l + 1` augmentation equal an `l` augmentation.
pub fn noise_column(n: usize, k: usize, mean: f64, sd: f64, seed: u64) -> Vec<f64> {
    let dist = Normal::new(mean, sd).expect("validated noise parameters");
    let mut rng = SeedStream::new(seed, Domain::Noise).rng(k as u64);
    (0..n).map(|_| rng.sample(dist)).collect()
}

pub fn augment(data: &Dataset, l: usize, mean: f64, sd: f64, seed: u64) -> Result<AugmentedDataset, AugmentError> {
    if l == 0 {
        return Err(AugmentError::NoNoise);
    }
    if !(sd > 0.0 && sd.is_finite()) {
        return Err(AugmentError::BadScale(sd));
    }
    if !mean.is_finite() {
        return Err(AugmentError::BadMean(mean));
    }
    let taken: HashSet<&str> = data.feature_names().iter().map(String::as_str).collect();
    let mut noise_names = Vec::with_capacity(l);
    for k in 0..l {
        let plain = format!("noise_{}", k + 1);
        let name = if !taken.contains(plain.as_str()) {
            plain
        } else {
            let suffixed = format!("{plain}_probe");
            if taken.contains(suffixed.as_str()) {
                return Err(AugmentError::NameCollision(k));
            }
            suffixed
        };
        noise_names.push(name);
    }
    let noise_columns = (0..l).map(|k| noise_column(data.n(), k, mean, sd, seed)).collect();
    Ok(AugmentedDataset { base: data.clone(), noise_columns, noise_names })
}
