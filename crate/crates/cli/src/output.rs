use std::fmt::Write as _;
use std::path::Path;

use nabfs_core::simbench::{GridResult, GridSpec, SimConfig};
use nabfs_core::NabfsConfig;
use serde::Serialize;

use crate::error::CliError;

/// Results of `nabfs simulate`, with everything needed to rerun it.
#[derive(Debug, Serialize)]
pub struct SimulationDocument<'a> {
    pub simulation: &'a SimConfig,
    pub selection: &'a NabfsConfig,
    pub grid: &'a GridSpec,
    pub result: &'a GridResult,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(format!("cannot serialize: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

/// Aligned per-cell metric table for the terminal.
pub fn render_grid(grid: &GridResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>4} {:>4} {:>6} {:>3} {:>7} {:>7} {:>7} {:>5} {:>6}",
        "n", "p", "k", "rho", "l", "power", "type1", "jaccard", "reps", "failed"
    );
    for r in &grid.rows {
        let _ = write!(out, "{:>6} {:>4} {:>4} {:>6.3} {:>3}", r.n, r.p, r.k, r.rho, r.l);
        match &r.summary {
            Some(s) => {
                let _ = writeln!(
                    out,
                    " {:>7.4} {:>7.4} {:>7.4} {:>5} {:>6}",
                    s.power, s.type1, s.jaccard, s.replicates, s.failed
                );
            }
            None => {
                let _ = writeln!(out, " {:>7} {:>7} {:>7} {:>5} {:>6}", "NA", "NA", "NA", 0, "all");
            }
        }
    }
    out
}
