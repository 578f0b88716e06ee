//! End-to-end selection: augment, bootstrap, test, adjust, threshold. Also the
//! naive "beat the strongest probe once" baseline.

use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::inference::{holm_adjust, wilcoxon_one_sided, InferenceError, WsrResult};
use crate::learners::{fit_importances, LearnerError};
use crate::model::{ConfigError, Dataset, ImportanceMatrix, NabfsConfig};
use crate::noise::{augment, AugmentError, AugmentedDataset};
use crate::report::{FeatureReport, SelectionMethod, SelectionReport};
use crate::resampling::{paired_differences, replicate_importances, BootstrapPlan, ResampleError};
use crate::seed::{derive, Domain};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

fn check(data: &Dataset, cfg: &NabfsConfig) -> Result<(), PipelineError> {
    cfg.validate()?;
    cfg.learner.check_task(data.task())?;
    Ok(())
}

/// Augments `data` with the configured probes and fits every bootstrap replicate.
pub fn bootstrap_importances(data: &Dataset, cfg: &NabfsConfig) -> Result<(AugmentedDataset, ImportanceMatrix), PipelineError> {
    check(data, cfg)?;
    let aug = augment(data, cfg.noise_count, cfg.noise_mean, cfg.noise_sd, cfg.seed)?;
    let plan = BootstrapPlan::new(cfg.seed, cfg.bootstrap_count, data.n());
    let imp = replicate_importances(&aug, &cfg.learner, &plan)?;
    Ok((aug, imp))
}

/// Tests every real feature of `imp` and applies Holm at `cfg.alpha`.
pub fn report_from_importances(
    data: &Dataset,
    noise_names: &[String],
    imp: &ImportanceMatrix,
    cfg: &NabfsConfig,
) -> Result<SelectionReport, PipelineError> {
    let p = imp.feature_count();
    let tests: Vec<(f64, WsrResult)> = (0..p)
        .into_par_iter()
        .map(|j| {
            let d = paired_differences(imp, j);
            let margin = d.diffs.iter().sum::<f64>() / d.diffs.len() as f64;
            (margin, wilcoxon_one_sided(&d.diffs, cfg.exact_wsr_max_pairs))
        })
        .collect();
    let raw: Vec<f64> = tests.iter().map(|(_, t)| t.p_value).collect();
    let adjusted = holm_adjust(&raw)?;
    let keep = adjusted.rejections(cfg.alpha);

    let features: Vec<FeatureReport> = (0..p)
        .map(|j| {
            let (margin, t) = tests[j];
            FeatureReport {
                name: data.feature_names()[j].clone(),
                mean_importance: imp.real_column_mean(j),
                mean_noise_margin: margin,
                t_plus: Some(t.t_plus),
                effective_pairs: Some(t.effective_pairs),
                p_value: Some(t.p_value),
                adjusted_p_value: Some(adjusted.adjusted[j]),
                wsr_method: Some(t.method),
                selected: keep[j],
            }
        })
        .collect();
    Ok(finish(SelectionMethod::Nabfs, data, noise_names, cfg, features))
}

fn finish(
    method: SelectionMethod,
    data: &Dataset,
    noise_names: &[String],
    cfg: &NabfsConfig,
    features: Vec<FeatureReport>,
) -> SelectionReport {
    let selected = features.iter().filter(|f| f.selected).map(|f| f.name.clone()).collect();
    SelectionReport {
        method,
        task: data.task(),
        learner: cfg.learner.id().to_string(),
        seed: cfg.seed,
        n_rows: data.n(),
        n_features: data.p(),
        config: cfg.clone(),
        noise_names: noise_names.to_vec(),
        features,
        selected,
        elapsed_ms: None,
    }
}

/// Noise-augmented bootstrap selection. Deterministic in `(data, cfg)` apart from `elapsed_ms`.
pub fn nabfs_select(data: &Dataset, cfg: &NabfsConfig) -> Result<SelectionReport, PipelineError> {
    let start = Instant::now();
    let (aug, imp) = bootstrap_importances(data, cfg)?;
    let mut report = report_from_importances(data, aug.noise_names(), &imp, cfg)?;
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}

/// Features whose importance strictly exceeds the largest probe importance.
pub fn naive_selection(real: &[f64], noise: &[f64]) -> Vec<bool> {
    let max = noise.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    real.iter().map(|v| *v > max).collect()
}

/// One fit on the augmented data; no resampling and no test.
pub fn naive_threshold_select(data: &Dataset, cfg: &NabfsConfig) -> Result<SelectionReport, PipelineError> {
    let start = Instant::now();
    check(data, cfg)?;
    let aug = augment(data, cfg.noise_count, cfg.noise_mean, cfg.noise_sd, cfg.seed)?;
    let values = fit_importances(
        &aug.full_design(),
        data.response(),
        data.task(),
        &cfg.learner,
        derive(cfg.seed, Domain::Selection, 0),
    )?
    .into_values();
    let (real, noise) = values.split_at(data.p());
    let max = noise.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let keep = naive_selection(real, noise);
    let features = (0..data.p())
        .map(|j| FeatureReport {
            name: data.feature_names()[j].clone(),
            mean_importance: real[j],
            mean_noise_margin: real[j] - max,
            t_plus: None,
            effective_pairs: None,
            p_value: None,
            adjusted_p_value: None,
            wsr_method: None,
            selected: keep[j],
        })
        .collect();
    let mut report = finish(SelectionMethod::Naive, data, aug.noise_names(), cfg, features);
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    Ok(report)
}
