//! End-to-end experiments: trial runs, comparison tables, parameter sweeps,
//! timing and map export.

mod bench;
mod experiment;
mod export;
mod report;
mod sweep;

pub use bench::{run_bench, BenchEnvironment, BenchReport, BenchRow};
pub use experiment::{
    run_experiment, run_trial, trial_rng, EncodingParams, ExperimentConfig, ExperimentReport,
    Method, TaskSummary, TrialResult, DEFAULT_STEPS_PER_TASK, SCHEMA_VERSION,
};
pub use export::{cluster_color, export_map, fit_map, render_svg, ExportFormat, FittedMap};
pub use report::{report_tables, Comparison, ComparisonCell, ComparisonTable, SIGNIFICANCE_LEVEL};
pub use sweep::{default_grid, run_sweep, SweepCell, SweepEntry, SweepReport};

use crate::error::{Error, Result};

/// Environment variable capping the trial worker pool.
pub const THREADS_ENV: &str = "CHUNKLAB_THREADS";

/// Worker pool for independent trials, sized by `CHUNKLAB_THREADS` when set.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads_from_env()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => parse_threads(&v).map(Some),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Error::Config(format!("{THREADS_ENV}: {e}"))),
    }
}

fn parse_threads(v: &str) -> Result<usize> {
    match v.trim().parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(Error::Config(format!(
            "{THREADS_ENV} must be a positive integer, got {v:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_parsing() {
        assert_eq!(parse_threads("4").unwrap(), 4);
        assert_eq!(parse_threads(" 2 ").unwrap(), 2);
        assert!(parse_threads("0").is_err());
        assert!(parse_threads("many").is_err());
    }
}
