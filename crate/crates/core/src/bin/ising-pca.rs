use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use ising_pca::experiments::{output_paths, run, OutputFormat, PartialConfig};
use ising_pca::Error;

/// Run a named experiment and emit its result table.
///
/// Experiments: exact-verify, tv-theorem1, mixing-exact, coupling-bound,
/// stopping-times, discrepancy-walk, effective-validate, tunneling-scaling,
/// glauber-compare. Worker count comes from ISING_PCA_WORKERS.
#[derive(Parser, Debug)]
#[command(name = "ising-pca", version)]
struct Cli {
    /// Experiment name (alternative to --experiment).
    #[arg(value_name = "EXPERIMENT")]
    name: Option<String>,
    #[arg(long)]
    experiment: Option<String>,
    /// Side length, or a comma-separated list.
    #[arg(long = "L", value_delimiter = ',')]
    sides: Option<Vec<usize>>,
    #[arg(long = "J")]
    coupling: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    k: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Output path; the extension is set by the format.
    #[arg(long)]
    out: Option<PathBuf>,
    /// json, csv or both.
    #[arg(long)]
    format: Option<String>,
    /// TOML or JSON file with any of the fields above; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("bad arguments").trim_start_matches("error: ");
            eprintln!("error: usage: {line}");
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    if cli.name.is_some() && cli.experiment.is_some() && cli.name != cli.experiment {
        return Err(Error::InvalidConfig("experiment given twice with different names".into()));
    }
    let base = match &cli.config {
        Some(p) => PartialConfig::from_file(p)?,
        None => PartialConfig::default(),
    };
    let flags = PartialConfig {
        experiment: cli.experiment.or(cli.name),
        sides: cli.sides,
        coupling: cli.coupling,
        q: cli.q,
        k: cli.k,
        c: cli.c,
        seed: cli.seed,
        trials: cli.trials,
        budget: cli.budget,
        out: cli.out,
        format: cli.format,
    };
    let config = base.merge(flags).build()?;
    let table = run(&config)?;
    match &config.out {
        Some(out) => {
            for f in output_paths(out, config.format) {
                println!("{}", f.display());
            }
        }
        None => match config.format {
            OutputFormat::Csv => print!("{}", table.to_csv()?),
            _ => println!("{}", table.to_json()),
        },
    }
    Ok(())
}

