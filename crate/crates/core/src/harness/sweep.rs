use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::experiment::{run_experiment, ExperimentConfig, ExperimentReport, Method};
use crate::dynamics::AlphaMode;
use crate::error::{Error, Result};
use crate::problems::ProblemId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
    pub dims: usize,
}

impl SweepCell {
    pub fn new(alpha: f64, alpha_mode: AlphaMode, dims: usize) -> Self {
        Self {
            alpha,
            alpha_mode,
            dims,
        }
    }

    pub fn apply(&self, base: &ExperimentConfig) -> ExperimentConfig {
        let mut c = base.clone();
        c.method = Method::Syncmap;
        c.dynamics.alpha = self.alpha;
        c.dynamics.alpha_mode = self.alpha_mode;
        c.dynamics.dims = self.dims;
        c
    }
}

/// The eight published parameter rows, 3d block first.
pub fn default_grid() -> Vec<SweepCell> {
    let rows = [
        (0.1, AlphaMode::Fixed),
        (0.01, AlphaMode::Fixed),
        (0.01, AlphaMode::ScaledByN),
        (0.001, AlphaMode::ScaledByN),
    ];
    [3, 2]
        .into_iter()
        .flat_map(|dims| rows.iter().map(move |&(a, m)| SweepCell::new(a, m, dims)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub cell: SweepCell,
    pub problem: ProblemId,
    pub report: Option<ExperimentReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub grid: Vec<SweepCell>,
    pub problems: Vec<ProblemId>,
    pub entries: Vec<SweepEntry>,
}

/// Runs every grid cell on every problem. A failing cell is recorded and
/// the sweep moves on.
pub fn run_sweep(base: &ExperimentConfig, problems: &[ProblemId], grid: &[SweepCell]) -> Result<SweepReport> {
    if grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if problems.is_empty() {
        return Err(Error::Config("sweep needs at least one problem".into()));
    }
    let mut entries = Vec::with_capacity(grid.len() * problems.len());
    for cell in grid {
        for p in problems {
            let mut config = cell.apply(base);
            config.problem = p.clone();
            let (report, error) = match run_experiment(&config) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            entries.push(SweepEntry {
                cell: *cell,
                problem: p.clone(),
                report,
                error,
            });
        }
    }
    Ok(SweepReport {
        grid: grid.to_vec(),
        problems: problems.to_vec(),
        entries,
    })
}

impl SweepReport {
    pub fn entry(&self, cell: &SweepCell, problem: &ProblemId) -> Option<&SweepEntry> {
        self.entries
            .iter()
            .find(|e| e.cell == *cell && e.problem == *problem)
    }

    /// One text table for continual problems and one for the rest.
    pub fn to_text(&self) -> String {
        let (continual, single): (Vec<&ProblemId>, Vec<&ProblemId>) =
            self.problems.iter().partition(|p| p.is_continual());
        let mut out = String::new();
        for group in [single, continual] {
            if group.is_empty() {
                continue;
            }
            out.push_str(&self.group_table(&group));
            out.push('\n');
        }
        out
    }

    fn group_table(&self, problems: &[&ProblemId]) -> String {
        let mut header = vec!["parameters".to_string()];
        let mut columns: Vec<(&ProblemId, usize)> = Vec::new();
        for p in problems {
            let n_tasks = self
                .entries
                .iter()
                .filter(|e| e.problem == **p)
                .find_map(|e| e.report.as_ref().map(ExperimentReport::n_tasks))
                .unwrap_or(1);
            for t in 0..n_tasks {
                header.push(if n_tasks > 1 {
                    format!("{p} task {}", t + 1)
                } else {
                    p.to_string()
                });
                columns.push((p, t));
            }
        }
        let mut rows = vec![header];
        for cell in &self.grid {
            let mode = match cell.alpha_mode {
                AlphaMode::Fixed => "fixed",
                AlphaMode::ScaledByN => "out",
            };
            let mut row = vec![format!("({}, {mode}, {}d)", cell.alpha, cell.dims)];
            for (p, t) in &columns {
                let text = match self.entry(cell, p) {
                    Some(SweepEntry {
                        report: Some(r), ..
                    }) => r
                        .summary(*t)
                        .map_or("failed".into(), |s| format!("{:.2}±{:.2}", s.mean, s.std)),
                    _ => "error".into(),
                };
                row.push(text);
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in rows.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            let _ = writeln!(out, "| {} |", line.join(" | "));
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                let _ = writeln!(out, "| {} |", rule.join(" | "));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_eight_rows() {
        let g = default_grid();
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], SweepCell::new(0.1, AlphaMode::Fixed, 3));
        assert_eq!(g[3], SweepCell::new(0.001, AlphaMode::ScaledByN, 3));
        assert_eq!(g[4], SweepCell::new(0.1, AlphaMode::Fixed, 2));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let base = ExperimentConfig::new(ProblemId::FixedChunks, Method::Syncmap);
        assert!(matches!(run_sweep(&base, &[ProblemId::FixedChunks], &[]), Err(Error::Config(_))));
        assert!(run_sweep(&base, &[], &default_grid()).is_err());
    }

    #[test]
    fn failing_cell_does_not_stop_the_sweep() {
        let base = ExperimentConfig {
            trials: 2,
            steps_per_task: 1_000,
            ..ExperimentConfig::new(ProblemId::FixedChunks, Method::Syncmap)
        };
        let grid = [SweepCell::new(0.1, AlphaMode::Fixed, 3), SweepCell::new(-1.0, AlphaMode::Fixed, 3)];
        let problems = [ProblemId::FixedChunks, ProblemId::ContinualFixed];
        let r = run_sweep(&base, &problems, &grid).unwrap();
        assert_eq!(r.entries.len(), 4);
        assert!(r.entry(&grid[0], &problems[1]).unwrap().report.is_some());
        assert!(r.entry(&grid[1], &problems[0]).unwrap().error.is_some());
        let text = r.to_text();
        assert!(text.contains("continual_fixed task 2"), "{text}");
        assert!(text.contains("error"), "{text}");
    }
}
