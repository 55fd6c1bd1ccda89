use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::experiment::{run_trial, ExperimentConfig, Method};
use crate::error::{Error, Result};
use crate::metrics::{aggregate, Summary};
use crate::problems::ProblemId;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub method: Method,
    pub label: String,
    /// Seconds per trial.
    pub samples: Vec<f64>,
    pub timing: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchEnvironment {
    pub os: String,
    pub arch: String,
    pub available_cpus: usize,
    pub build: String,
}

impl BenchEnvironment {
    fn current() -> Self {
        Self {
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            available_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            build: if cfg!(debug_assertions) { "debug" } else { "release" }.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub problem: ProblemId,
    pub trials: usize,
    pub steps_per_task: usize,
    pub environment: BenchEnvironment,
    pub rows: Vec<BenchRow>,
}

/// Times each method on the same generated inputs. Trials run one after
/// another on the calling thread so they do not compete for cores.
pub fn run_bench(base: &ExperimentConfig, methods: &[Method]) -> Result<BenchReport> {
    if methods.is_empty() {
        return Err(Error::Config("bench needs at least one method".into()));
    }
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let config = ExperimentConfig {
            method,
            ..base.clone()
        };
        config.validate()?;
        let schedule = config.schedule()?;
        let mut samples = Vec::with_capacity(config.trials);
        for trial in 0..config.trials {
            let r = run_trial(&config, &schedule, trial);
            if let Some(e) = r.error {
                return Err(Error::Config(format!("{method} trial {trial} failed: {e}")));
            }
            samples.push(r.wall_clock_s);
        }
        rows.push(BenchRow {
            method,
            label: config.label(),
            timing: aggregate(&samples)?,
            samples,
        });
    }
    Ok(BenchReport {
        problem: base.problem.clone(),
        trials: base.trials,
        steps_per_task: base.steps_per_task,
        environment: BenchEnvironment::current(),
        rows,
    })
}

impl BenchReport {
    pub fn row(&self, method: Method) -> Option<&BenchRow> {
        self.rows.iter().find(|r| r.method == method)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} trials on {}, {} steps per task ({} {}, {} cpus, {} build)",
            self.trials,
            self.problem,
            self.steps_per_task,
            self.environment.os,
            self.environment.arch,
            self.environment.available_cpus,
            self.environment.build
        );
        let width = self.rows.iter().map(|r| r.label.len()).max().unwrap_or(0).max(6);
        let _ = writeln!(out, "{:<width$}  seconds per trial", "method");
        for r in &self.rows {
            let _ = writeln!(out, "{:<width$}  {:.4}±{:.4}", r.label, r.timing.mean, r.timing.std);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_row_per_method_and_one_sample_per_trial() {
        let base = ExperimentConfig {
            trials: 5,
            steps_per_task: 1_000,
            ..ExperimentConfig::new(ProblemId::FixedChunks, Method::Syncmap)
        };
        let r = run_bench(&base, &[Method::Parser]).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].samples.len(), 5);
        assert!(r.rows[0].samples.iter().all(|s| *s > 0.0));
        assert!(r.to_text().contains("parser"));
        assert!(run_bench(&base, &[]).is_err());
    }
}
