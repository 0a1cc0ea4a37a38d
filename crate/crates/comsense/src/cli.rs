//! `comsense` subcommands and exit codes.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{ConfigError, SweepSpec};
use crate::figures;
use crate::output::{self, OutputPaths, PlotSpec};
use crate::sweep::{self, Table};

/// Configuration or usage error.
pub const EXIT_CONFIG: i32 = 2;
/// At least one cell failed numerically; the CSV holds error codes.
pub const EXIT_NUMERIC: i32 = 3;
/// Reading or writing files failed.
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "comsense", version, about = "Critical quantum sensing sweeps for linearized cavity optomechanics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the sweep described by an INI config.
    Run {
        /// Config file.
        config: PathBuf,
        /// Output directory; overrides the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; overrides the config and COMSENSE_WORKERS.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Emit the data and plot behind one figure.
    Figure {
        /// One of fig2, fig3a, fig3b, fig4, fig5, fig6, fig7, fig8.
        name: String,
        /// Override a preset value, e.g. `--set lambda=0.95` or `--set points=100`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads; overrides COMSENSE_WORKERS.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a config without evaluating it.
    Validate {
        /// Config file.
        config: PathBuf,
    },
}

enum Failure {
    Config(ConfigError),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

/// Worker count: explicit value, then the config, then `COMSENSE_WORKERS`,
/// then the available parallelism.
pub fn resolve_workers(explicit: Option<usize>, config: Option<usize>) -> Result<usize, ConfigError> {
    if let Some(w) = explicit.or(config) {
        if w == 0 {
            return Err(ConfigError("worker count must be positive".into()));
        }
        return Ok(w);
    }
    if let Ok(v) = std::env::var("COMSENSE_WORKERS") {
        return match v.trim().parse::<usize>() {
            Ok(w) if w > 0 => Ok(w),
            _ => Err(ConfigError(format!("COMSENSE_WORKERS must be a positive integer, got '{v}'"))),
        };
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn read_config(path: &Path) -> Result<SweepSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(SweepSpec::from_text(&text)?)
}

fn emit(dir: &Path, name: &str, table: &Table, config: serde_json::Value, plot: &PlotSpec) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
    let paths = OutputPaths::new(dir, name);
    output::write_outputs(&paths, table, config, plot)
        .map_err(|e| Failure::Io(format!("cannot write {}: {e}", paths.csv.display())))?;
    println!("wrote {} ({} rows)", paths.csv.display(), table.rows.len());
    Ok(())
}

fn default_plot(spec: &SweepSpec, table: &Table) -> PlotSpec {
    let x = spec
        .axes
        .iter()
        .max_by_key(|a| a.values.len())
        .map(|a| if a.param == crate::config::Param::S { "time".to_string() } else { a.param.name().to_string() })
        .unwrap_or_default();
    let group = spec.axes.iter().map(|a| a.param.name().to_string()).filter(|n| *n != x && n != "s").collect();
    let skip = ["time", "cutoff_used", "tail_mass", "eps_np_real", "phase", "ordering", "working_point_marker"];
    let y = table.columns[spec.axes.len()..].iter().filter(|c| !skip.contains(&c.as_str())).cloned().collect();
    PlotSpec { x, y, group }
}

fn run_command(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Validate { config } => {
            let spec = read_config(&config)?;
            println!("{}: {} grid points, columns: {}", config.display(), spec.len(), sweep::columns(&spec).join(","));
            Ok(0)
        }
        Command::Run { config, out, workers } => {
            let spec = read_config(&config)?;
            let workers = resolve_workers(workers, spec.workers)?;
            let table = sweep::run(&spec, workers);
            let dir = out.or_else(|| spec.output.clone()).unwrap_or_else(|| PathBuf::from("."));
            let plot = default_plot(&spec, &table);
            let meta = serde_json::json!({ "sweep": spec.to_json(), "workers": workers });
            emit(&dir, &spec.name, &table, meta, &plot)?;
            Ok(report(&table))
        }
        Command::Figure { name, set, out, workers } => {
            let panels = figures::build(&name, &set)?;
            let workers = resolve_workers(workers, None)?;
            let mut code = 0;
            for panel in panels {
                let mut table: Option<Table> = None;
                let mut parts = Vec::new();
                for part in &panel.parts {
                    let t = sweep::run(&part.spec, workers).with_labels(&part.labels);
                    match table.as_mut() {
                        Some(acc) => acc.extend(t),
                        None => table = Some(t),
                    }
                    let labels: serde_json::Map<String, serde_json::Value> =
                        part.labels.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
                    parts.push(serde_json::json!({ "labels": labels, "sweep": part.spec.to_json() }));
                }
                let table = table.expect("panel has parts");
                let meta = serde_json::json!({ "figure": name, "overrides": set, "parts": parts, "workers": workers });
                emit(&out, &panel.name, &table, meta, &panel.plot)?;
                code = code.max(report(&table));
            }
            Ok(code)
        }
    }
}

fn report(table: &Table) -> i32 {
    let errors = table.error_cells();
    if errors > 0 {
        eprintln!("comsense: {errors} cell(s) failed; see error codes in the CSV");
        EXIT_NUMERIC
    } else {
        0
    }
}

/// Parses `std::env::args` and runs; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(Failure::Config(e)) => {
            eprintln!("comsense: {e}");
            EXIT_CONFIG
        }
        Err(Failure::Io(e)) => {
            eprintln!("comsense: {e}");
            EXIT_IO
        }
    }
}
