//! Named experiments: configuration, dispatch, and result tables.

mod config;
mod runs;
mod table;

use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{
    Experiment, ExperimentConfig, OutputFormat, ParameterSpec, PartialConfig, DEFAULT_BUDGET, DEFAULT_SEED,
    DEFAULT_TRIALS,
};
pub use runs::{
    discrepancy_start, materially_worse, one_step_comparison, time_grid, tv_between, OneStepComparison,
    MATERIAL_FACTOR, MIXING_THRESHOLD,
};
pub use table::{output_paths, Metadata, ResultTable};

pub use crate::stats::{loglog_fit, semilog_fit, summarize};

use crate::error::{Error, Result};

/// Environment variable holding the worker-pool size.
pub const WORKERS_ENV: &str = "ISING_PCA_WORKERS";

/// Pool size from [`WORKERS_ENV`], else one worker per available processor.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::InvalidConfig(format!("{WORKERS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Validate, compute, stamp and (when `out` is set) write the table.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let mut table = pool.install(|| match config.experiment {
        Experiment::ExactVerify => runs::exact_verify(config),
        Experiment::TvTheorem1 => runs::tv_theorem1(config),
        Experiment::MixingExact => runs::mixing_exact(config),
        Experiment::CouplingBound => runs::coupling_bound(config),
        Experiment::StoppingTimes => runs::stopping_times(config),
        Experiment::DiscrepancyWalk => runs::discrepancy_walk(config),
        Experiment::EffectiveValidate => runs::effective_validate(config),
        Experiment::TunnelingScaling => runs::tunneling_scaling(config),
        Experiment::GlauberCompare => runs::glauber_compare(config),
    })?;
    table.metadata.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    if let Some(out) = &config.out {
        table.write(out, config.format)?;
    }
    Ok(table)
}
