use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::experiment::ExperimentReport;
use crate::error::{Error, Result};
use crate::metrics::welch_t_test;
use crate::problems::ProblemId;

/// Methods whose Welch p-value against the best is at least this are
/// marked alongside it.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub label: String,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    /// Welch p-value against the best row; `None` for the best row itself
    /// or when either side has fewer than two scores.
    pub p_vs_best: Option<f64>,
    pub bold: bool,
}

/// One problem/task column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub problem: ProblemId,
    pub task: usize,
    pub cells: Vec<ComparisonCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub legend: String,
    pub tables: Vec<ComparisonTable>,
}

const LEGEND: &str = "bold: best mean, and every method whose Welch t-test against the best \
                      does not reject equal means at the 5% level (p >= 0.05)";

/// Builds per-problem comparison tables. Every method label must have
/// exactly one report for every problem present.
pub fn report_tables(reports: &[ExperimentReport]) -> Result<Comparison> {
    if reports.is_empty() {
        return Err(Error::Config("no reports to compare".into()));
    }
    let mut grid: BTreeMap<(ProblemId, String), &ExperimentReport> = BTreeMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut problems: BTreeSet<ProblemId> = BTreeSet::new();
    for r in reports {
        if !labels.contains(&r.label) {
            labels.push(r.label.clone());
        }
        problems.insert(r.config.problem.clone());
        if grid.insert((r.config.problem.clone(), r.label.clone()), r).is_some() {
            return Err(Error::Config(format!(
                "two reports for {} on {}",
                r.label, r.config.problem
            )));
        }
    }
    for p in &problems {
        for l in &labels {
            if !grid.contains_key(&(p.clone(), l.clone())) {
                return Err(Error::Config(format!("{l} has no report for {p}")));
            }
        }
    }
    let mut tables = Vec::new();
    for p in &problems {
        let rows: Vec<&ExperimentReport> = labels.iter().map(|l| grid[&(p.clone(), l.clone())]).collect();
        let n_tasks = rows[0].n_tasks();
        if rows.iter().any(|r| r.n_tasks() != n_tasks) {
            return Err(Error::Config(format!("task counts differ on {p}")));
        }
        for task in 0..n_tasks {
            tables.push(compare_task(p, task, &rows)?);
        }
    }
    Ok(Comparison {
        legend: LEGEND.into(),
        tables,
    })
}

fn compare_task(problem: &ProblemId, task: usize, rows: &[&ExperimentReport]) -> Result<ComparisonTable> {
    let scores: Vec<Vec<f64>> = rows.iter().map(|r| r.scores(task)).collect();
    let mut cells: Vec<ComparisonCell> = rows
        .iter()
        .zip(&scores)
        .map(|(r, s)| {
            let summary = r.summary(task);
            ComparisonCell {
                label: r.label.clone(),
                mean: summary.map_or(f64::NAN, |s| s.mean),
                std: summary.map_or(f64::NAN, |s| s.std),
                n: s.len(),
                p_vs_best: None,
                bold: false,
            }
        })
        .collect();
    let best = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.n > 0)
        .max_by(|a, b| a.1.mean.total_cmp(&b.1.mean).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i);
    if let Some(best) = best {
        cells[best].bold = true;
        for i in 0..cells.len() {
            if i == best || cells[i].n == 0 {
                continue;
            }
            if let Ok(p) = welch_t_test(&scores[best], &scores[i]) {
                cells[i].p_vs_best = Some(p);
                cells[i].bold = p >= SIGNIFICANCE_LEVEL;
            } else {
                cells[i].bold = cells[i].mean == cells[best].mean;
            }
        }
    }
    Ok(ComparisonTable {
        problem: problem.clone(),
        task,
        cells,
    })
}

impl Comparison {
    /// Plain-text rendering with one column per problem/task and bold
    /// cells wrapped in `**`.
    pub fn to_text(&self) -> String {
        let mut labels: Vec<&str> = Vec::new();
        for t in &self.tables {
            for c in &t.cells {
                if !labels.contains(&c.label.as_str()) {
                    labels.push(&c.label);
                }
            }
        }
        let multi_task: BTreeSet<&ProblemId> = self
            .tables
            .iter()
            .filter(|t| t.task > 0)
            .map(|t| &t.problem)
            .collect();
        let mut header = vec!["method".to_string()];
        for t in &self.tables {
            header.push(if multi_task.contains(&t.problem) {
                format!("{} task {}", t.problem, t.task + 1)
            } else {
                t.problem.to_string()
            });
        }
        let mut rows = vec![header];
        for l in &labels {
            let mut row = vec![l.to_string()];
            for t in &self.tables {
                let cell = t.cells.iter().find(|c| c.label == *l);
                row.push(match cell {
                    Some(c) if c.n > 0 => {
                        let s = format!("{:.2}±{:.2}", c.mean, c.std);
                        if c.bold {
                            format!("**{s}**")
                        } else {
                            s
                        }
                    }
                    _ => "n/a".into(),
                });
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
        let _ = writeln!(out, "\n{}", self.legend);
        out
    }
}
