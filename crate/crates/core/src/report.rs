//! The per-run selection report and its plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::inference::WsrMethod;
use crate::model::{NabfsConfig, TaskKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMethod {
    /// Bootstrap signed-rank testing with Holm adjustment.
    Nabfs,
    /// Single fit, keep features strictly above the strongest probe.
    Naive,
}

impl SelectionMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionMethod::Nabfs => "nabfs",
            SelectionMethod::Naive => "naive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureReport {
    pub name: String,
    /// Mean importance over replicates (the single-fit importance for the naive method).
    pub mean_importance: f64,
    /// Mean of importance minus the replicate's strongest probe.
    pub mean_noise_margin: f64,
    pub t_plus: Option<f64>,
    pub effective_pairs: Option<usize>,
    pub p_value: Option<f64>,
    pub adjusted_p_value: Option<f64>,
    pub wsr_method: Option<WsrMethod>,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub method: SelectionMethod,
    pub task: TaskKind,
    pub learner: String,
    pub seed: u64,
    pub n_rows: usize,
    pub n_features: usize,
    pub config: NabfsConfig,
    pub noise_names: Vec<String>,
    pub features: Vec<FeatureReport>,
    pub selected: Vec<String>,
    /// Wall-clock time of the run; left empty when reports must be reproducible byte-for-byte.
    pub elapsed_ms: Option<u64>,
}

fn fmt_p(p: f64) -> String {
    if p >= 1e-4 {
        format!("{p:.4}")
    } else {
        format!("{p:.3e}")
    }
}

impl SelectionReport {
    pub fn selected_mask(&self) -> Vec<bool> {
        self.features.iter().map(|f| f.selected).collect()
    }

    pub fn adjusted_p_values(&self) -> Option<Vec<f64>> {
        self.features.iter().map(|f| f.adjusted_p_value).collect()
    }

    /// Checks `raw <= adjusted <= 1` and `selected == (adjusted < alpha)` for every tested feature.
    pub fn check_invariants(&self) -> Result<(), String> {
        for f in &self.features {
            match (f.p_value, f.adjusted_p_value) {
                (Some(raw), Some(adj)) => {
                    if !(0.0..=1.0).contains(&raw) || !(0.0..=1.0).contains(&adj) || adj < raw {
                        return Err(format!("{}: raw {raw} / adjusted {adj} out of order", f.name));
                    }
                    if f.selected != (adj < self.config.alpha) {
                        return Err(format!("{}: selection flag disagrees with adjusted p-value", f.name));
                    }
                }
                (None, None) => {}
                _ => return Err(format!("{}: only one of raw/adjusted p-value present", f.name)),
            }
        }
        let names: Vec<&str> = self.features.iter().filter(|f| f.selected).map(|f| f.name.as_str()).collect();
        if names != self.selected.iter().map(String::as_str).collect::<Vec<_>>() {
            return Err("selected list disagrees with per-feature flags".into());
        }
        Ok(())
    }

    /// Aligned text table followed by a one-line summary.
    pub fn render_table(&self) -> String {
        let fmt_opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$}"));
        let header = ["feature", "importance", "margin", "T+", "pairs", "p_raw", "p_adj", "selected"];
        let rows: Vec<[String; 8]> = self
            .features
            .iter()
            .map(|f| {
                [
                    f.name.clone(),
                    format!("{:.6}", f.mean_importance),
                    format!("{:+.6}", f.mean_noise_margin),
                    fmt_opt(f.t_plus, 1),
                    f.effective_pairs.map_or_else(|| "-".into(), |v| v.to_string()),
                    f.p_value.map_or_else(|| "-".into(), fmt_p),
                    f.adjusted_p_value.map_or_else(|| "-".into(), fmt_p),
                    if f.selected { "yes".into() } else { "no".into() },
                ]
            })
            .collect();
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "method={} learner={} task={} n={} p={} noise={} bootstraps={} alpha={} seed={}",
            self.method.as_str(),
            self.learner,
            self.task.as_str(),
            self.n_rows,
            self.n_features,
            self.config.noise_count,
            self.config.bootstrap_count,
            self.config.alpha,
            self.seed
        );
        let line = |cells: &[&str]| {
            cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(i, (c, w))| if i == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                .collect::<Vec<_>>()
                .join("  ")
        };
        let _ = writeln!(out, "{}", line(&header));
        for r in &rows {
            let cells: Vec<&str> = r.iter().map(String::as_str).collect();
            let _ = writeln!(out, "{}", line(&cells));
        }
        if self.selected.is_empty() {
            let _ = writeln!(out, "no features selected");
        } else {
            let _ = writeln!(out, "selected ({}): {}", self.selected.len(), self.selected.join(", "));
        }
        out
    }
}
