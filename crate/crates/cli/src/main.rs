use clap::{Parser, Subcommand};
use fraclap::Execution;
use fraclap_cli::config::parse_key_value;
use fraclap_cli::{CaseRegistry, CliError, GridSpec, RunConfig, SliceLine, SolverKind, Table};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

/// Fractional Laplacian benchmark harness. Set FRACLAP_THREADS to size the
/// worker pool.
#[derive(Parser)]
#[command(name = "fraclap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver on one case and write the field as CSV.
    Solve {
        /// JSON run config; command-line flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        case: Option<String>,
        /// spectral, spectral-lift, spectral-heatsg, wos, rbf or fvm
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// uniform:N, slice:y0|yx|y1mx:N or points:x,y;x,y
        #[arg(long)]
        grid: Option<String>,
        /// Solver parameter, repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Difference of two solve outputs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Restrict 2D fields to y0, yx or y1mx.
        #[arg(long)]
        slice: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named study.
    Study {
        name: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Run parameter points one at a time.
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the registered cases.
    ListCases,
}

fn emit(t: &Table, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(p) => t.write_path(p),
        None => t.write_to(&mut std::io::stdout().lock()),
    }
}

fn collect_params(raw: &[String]) -> Result<BTreeMap<String, serde_json::Value>, CliError> {
    raw.iter()
        .map(|s| parse_key_value(s).map(|(k, v)| (k, serde_json::Value::String(v))))
        .collect()
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let registry = CaseRegistry::standard();
    match cli.command {
        Command::Solve { config, case, solver, alpha, seed, grid, params, out } => {
            let mut cfg = match config {
                Some(p) => RunConfig::from_json(&std::fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?)?,
                None => {
                    let case = case.clone().ok_or_else(|| CliError::Config("--case is required without --config".into()))?;
                    let solver = solver.as_deref().ok_or_else(|| CliError::Config("--solver is required without --config".into()))?;
                    RunConfig::new(&case, SolverKind::parse(solver)?)
                }
            };
            if let Some(c) = case {
                cfg.case = c;
            }
            if let Some(s) = solver {
                cfg.solver = SolverKind::parse(&s)?;
            }
            cfg.alpha = alpha.or(cfg.alpha);
            cfg.seed = seed.unwrap_or(cfg.seed);
            if let Some(g) = grid {
                cfg.grid = GridSpec::parse(&g)?;
            }
            cfg.params.extend(collect_params(&params)?);
            cfg.out = out.or(cfg.out);
            let table = fraclap_cli::run(&cfg, &registry)?;
            emit(&table, cfg.out.as_ref())
        }
        Command::Compare { a, b, slice, out } => {
            let slice = slice.as_deref().map(SliceLine::parse).transpose()?;
            let t = fraclap_cli::compare(&Table::read_path(&a)?, &Table::read_path(&b)?, slice)?;
            emit(&t, out.as_ref())
        }
        Command::Study { name, params, sequential, out } => {
            let params = collect_params(&params)?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let t = fraclap_cli::study(&name, fraclap_cli::config::Params(&params), exec)?;
            emit(&t, out.as_ref())
        }
        Command::ListCases => {
            let mut t = Table::new(&["name", "domain", "default_alpha", "data", "description"]);
            for c in registry.iter() {
                let data = if c.zero_data() { "zero" } else { "nonzero" };
                t.push(vec![c.name.clone().into(), c.domain.name().into(), c.default_alpha.into(), data.into(), c.description.clone().into()]);
            }
            emit(&t, None)
        }
    }
}

fn main() -> ExitCode {
    if let Err(e) = fraclap::par::configure_threads_from_env() {
        eprintln!("fraclap: {e}");
        return ExitCode::from(2);
    }
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fraclap: {e}");
            ExitCode::FAILURE
        }
    }
}
