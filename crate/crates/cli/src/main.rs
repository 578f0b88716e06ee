//! `nabfs` command-line front end.
//!
//! Exit codes: 0 success, 2 argument errors, 3 data errors, 4 runtime errors.

mod args;
mod chart;
mod error;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;
use nabfs_core::simbench::{grid_sweep, GridSpec, SimConfig};
use nabfs_core::{nabfs_select, naive_threshold_select, with_workers, SelectionMethod};

use args::{Cli, Command, NabfsArgs, SelectArgs, SimulateArgs};
use error::CliError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Select(a) => select(a, SelectionMethod::Nabfs),
        Command::Baseline(a) => select(a, SelectionMethod::Naive),
        Command::Simulate(a) => simulate(a),
    }
}

fn in_pool<T: Send>(nabfs: &NabfsArgs, f: impl FnOnce() -> T + Send) -> T {
    match nabfs.workers {
        Some(w) => with_workers(usize::from(w), f),
        None => f(),
    }
}

fn select(args: SelectArgs, method: SelectionMethod) -> Result<(), CliError> {
    let config = args.nabfs.config();
    config.validate().map_err(error::config_error)?;
    let table = input::read_table(&args.input, args.delimiter)?;
    let data = input::to_dataset(table, &args.target, args.task)?;

    let mut report = in_pool(&args.nabfs, || match method {
        SelectionMethod::Nabfs => nabfs_select(&data, &config),
        SelectionMethod::Naive => naive_threshold_select(&data, &config),
    })?;
    if !args.record_timing {
        report.elapsed_ms = None;
    }
    print!("{}", report.render_table());
    if let Some(path) = &args.out {
        output::write_file(path, &output::to_json(&report)?)?;
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let selection = args.nabfs.config();
    selection.validate().map_err(error::config_error)?;
    let grid = if args.reference_grid {
        GridSpec::reference()
    } else {
        GridSpec { ns: args.n.clone(), rhos: args.rho.clone(), ls: args.l.clone().unwrap_or_else(|| vec![selection.noise_count]) }
    };
    let simulation = SimConfig {
        n: grid.ns.first().copied().unwrap_or(0),
        p: args.p,
        k: args.k,
        rho: grid.rhos.first().copied().unwrap_or(0.0),
        replicates: args.reps,
        master_seed: args.nabfs.seed,
        redraw_beta: !args.fixed_beta,
        ..SimConfig::default()
    };
    // Reject bad cells up front so they surface as argument errors.
    for (n, rho, l) in grid.cells() {
        SimConfig { n, rho, ..simulation.clone() }.validate()?;
        if l == 0 {
            return Err(CliError::Usage("--l values must be at least 1".into()));
        }
    }
    selection.learner.check_task(nabfs_core::TaskKind::BinaryClassification).map_err(|e| CliError::Usage(e.to_string()))?;

    let result = in_pool(&args.nabfs, || grid_sweep(&grid, &simulation, &selection))?;
    print!("{}", output::render_grid(&result));
    if let Some(path) = &args.out {
        let doc = output::SimulationDocument { simulation: &simulation, selection: &selection, grid: &grid, result: &result };
        output::write_file(path, &output::to_json(&doc)?)?;
    }
    if let Some(path) = &args.table {
        output::write_file(path, &result.to_delimited(','))?;
    }
    if let Some(path) = &args.chart {
        output::write_file(path, &chart::line_chart(&result, args.chart_metric))?;
    }
    let failures: Vec<String> = result
        .rows
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("n={} rho={} l={}: {e}", r.n, r.rho, r.l)))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Runtime(format!("{} grid cell(s) failed:\n  {}", failures.len(), failures.join("\n  "))))
    }
}
