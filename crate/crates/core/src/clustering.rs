//! DBSCAN over the learned map.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::dynamics::SyncMapState;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringConfig {
    pub eps: f64,
    /// DBSCAN `min_pts`, counting the point itself.
    pub min_cluster_size: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            eps: 3.0,
            min_cluster_size: 2,
        }
    }
}

impl ClusteringConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if self.min_cluster_size < 1 {
            return Err(Error::Config("min_cluster_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Cluster label per state; `None` marks noise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkAssignment {
    pub labels: Vec<Option<usize>>,
}

impl ChunkAssignment {
    pub fn n_clusters(&self) -> usize {
        self.labels.iter().flatten().map(|l| l + 1).max().unwrap_or(0)
    }

    pub fn noise_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Labels for scoring: each noise point becomes its own singleton
    /// cluster, numbered after the real clusters.
    pub fn scoring_labels(&self) -> Vec<usize> {
        let mut next = self.n_clusters();
        self.labels
            .iter()
            .map(|l| {
                l.unwrap_or_else(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    }

    /// Labels for export, with `-1` for noise.
    pub fn export_labels(&self) -> Vec<i64> {
        self.labels
            .iter()
            .map(|l| l.map_or(-1, |v| v as i64))
            .collect()
    }

    /// Renumbers arbitrary group ids to contiguous ids in first-seen order.
    pub fn from_groups(groups: &[usize]) -> Self {
        let mut seen: Vec<usize> = Vec::new();
        let labels = groups
            .iter()
            .map(|g| {
                Some(match seen.iter().position(|s| s == g) {
                    Some(p) => p,
                    None => {
                        seen.push(*g);
                        seen.len() - 1
                    }
                })
            })
            .collect();
        Self { labels }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Deterministic DBSCAN: points are scanned in index order and each
/// cluster is expanded breadth-first in index order, so a border point
/// reachable from two clusters belongs to the one created first.
pub fn dbscan(points: &[Vec<f64>], config: &ClusteringConfig) -> Result<ChunkAssignment> {
    config.validate()?;
    if points.is_empty() {
        return Err(Error::InputDomain("dbscan needs at least one point".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InputDomain("dbscan input must be finite".into()));
    }
    let n = points.len();
    let eps2 = config.eps * config.eps;
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| dist2(&points[i], &points[j]) <= eps2)
                .collect()
        })
        .collect();
    let is_core = |i: usize| neighbors[i].len() >= config.min_cluster_size;

    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut cluster = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if visited[start] || !is_core(start) {
            continue;
        }
        visited[start] = true;
        labels[start] = Some(cluster);
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            if !is_core(p) {
                continue;
            }
            for &q in &neighbors[p] {
                if labels[q].is_none() {
                    labels[q] = Some(cluster);
                }
                if !visited[q] {
                    visited[q] = true;
                    queue.push_back(q);
                }
            }
        }
        cluster += 1;
    }
    Ok(ChunkAssignment { labels })
}

pub fn assign_chunks(map: &SyncMapState, config: &ClusteringConfig) -> Result<ChunkAssignment> {
    dbscan(&map.to_rows(), config)
}
