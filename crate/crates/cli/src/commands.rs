use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use overlap_core::{Df, Hypothesis, PartoverTest, TestOutcome};

use crate::config::{OutputFormat, RunConfig};
use crate::data::read_data_file;
use crate::error::Result;
use crate::output::{rows, write_csv, write_markdown};
use crate::reproduce::{reproduce, Table};

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Runs the overlapping-samples test on a data file and formats the outcome.
pub fn cmd_test(path: &Path, mu: f64, var_equal: bool, discard_single_pair: bool) -> Result<String> {
    let data = read_data_file(path)?;
    let mut test = PartoverTest::new(var_equal);
    if discard_single_pair {
        test = test.discarding_single_pair();
    }
    let outcome = test.run(&data, &Hypothesis::new(mu))?;
    let mut s = format!("n_a: {}\nn_b: {}\nn_c: {}\n", data.n_a(), data.n_b(), data.n_c());
    s.push_str(&format_outcome(&outcome));
    Ok(s)
}

pub fn format_outcome(o: &TestOutcome) -> String {
    let mut s = String::new();
    let na = || "NA".to_string();
    let _ = writeln!(s, "statistic: {}", o.statistic.map_or_else(na, |t| t.to_string()));
    let df = match o.df {
        None => na(),
        Some(Df::T(v)) => v.to_string(),
        Some(Df::F(a, b)) => format!("{a}, {b}"),
    };
    let _ = writeln!(s, "df: {df}");
    let _ = writeln!(s, "p_value: {}", o.p_value);
    let _ = writeln!(s, "branch: {}", o.branch.name());
    s
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOverrides {
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub workers: Option<usize>,
}

/// Runs a configured grid. Progress and per-cell errors go to stderr.
pub fn cmd_simulate(config: &Path, overrides: &SimulateOverrides) -> Result<()> {
    let cfg = RunConfig::from_path(config)?;
    let grid = cfg.grid();
    let workers = overrides.workers.or(cfg.workers).unwrap_or_else(default_workers);
    eprintln!(
        "grid: {} cells x {} tests x {} replicates ({} workers)",
        grid.len(),
        cfg.tests.len(),
        cfg.reps,
        workers
    );

    let mc = overlap_core::MonteCarlo::new(cfg.tests.clone(), cfg.reps, cfg.alpha, cfg.seed);
    let results = mc.run_grid(&grid, workers);
    for (i, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("cell {i}: {e}");
        }
    }
    let table = rows(&grid, &results, &cfg.tests);

    let format = overrides.format.unwrap_or(cfg.output_format);
    let mut buf = Vec::new();
    match format {
        OutputFormat::Csv => write_csv(&mut buf, &table)?,
        OutputFormat::Markdown => write_markdown(&mut buf, &table)?,
    }
    match overrides.out.as_ref().or(cfg.output_path.as_ref()) {
        Some(path) => std::fs::write(path, buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub reps: u64,
    pub seed: u64,
    pub workers: usize,
    pub compare: bool,
    /// Replicates per cell for the Overall row of table 4; 0 skips it.
    pub overall_reps: u64,
}

pub fn cmd_reproduce(table: Table, opts: &ReproduceOptions) -> Result<String> {
    let overall = (opts.overall_reps > 0).then_some(opts.overall_reps);
    let r = reproduce(table, opts.reps, opts.seed, opts.workers, overall)?;
    let mut s = r.render();
    if opts.compare {
        s.push_str(&r.render_comparison());
    }
    Ok(s)
}
