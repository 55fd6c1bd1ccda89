//! Benchmark problems: Markov graphs, built-in generators, and continual
//! schedules.

mod generators;
mod graph;
mod long_chunks;
mod schedule;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use generators::{
    fixed_chunks_graph, gen_fixed_chunks, gen_fixed_chunks_permuted, gen_mixed, gen_mixed_task2,
    gen_overlap,
};
pub use graph::{load_graph, parse_graph, random_walk, TransitionGraph};
pub use long_chunks::LongChunks;
pub use schedule::{generate, make_schedule, ChunkedSequence, ContinualSchedule, TaskSource};

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES_PER_TASK: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ProblemId {
    FixedChunks,
    LongChunks,
    Overlap1,
    Overlap2,
    Mixed,
    ContinualFixed,
    ContinualMixed,
    /// A user-supplied graph file, e.g. a song-type transition graph.
    GraphFile(PathBuf),
}

impl ProblemId {
    pub const BUILTIN: [ProblemId; 7] = [
        ProblemId::FixedChunks,
        ProblemId::LongChunks,
        ProblemId::Overlap1,
        ProblemId::Overlap2,
        ProblemId::Mixed,
        ProblemId::ContinualFixed,
        ProblemId::ContinualMixed,
    ];

    pub fn tasks(&self) -> Result<Vec<TaskSource>> {
        Ok(match self {
            ProblemId::FixedChunks => vec![TaskSource::Graph(gen_fixed_chunks())],
            ProblemId::LongChunks => vec![TaskSource::LongChunks(LongChunks)],
            ProblemId::Overlap1 => vec![TaskSource::Graph(gen_overlap(1)?)],
            ProblemId::Overlap2 => vec![TaskSource::Graph(gen_overlap(2)?)],
            ProblemId::Mixed => vec![TaskSource::Graph(gen_mixed())],
            ProblemId::ContinualFixed => vec![
                TaskSource::Graph(gen_fixed_chunks()),
                TaskSource::Graph(gen_fixed_chunks_permuted()),
            ],
            ProblemId::ContinualMixed => vec![
                TaskSource::Graph(gen_mixed()),
                TaskSource::Graph(gen_mixed_task2()),
            ],
            ProblemId::GraphFile(path) => vec![TaskSource::Graph(load_graph(path)?)],
        })
    }

    pub fn schedule(&self, samples_per_task: usize) -> Result<ContinualSchedule> {
        make_schedule(self.tasks()?, samples_per_task)
    }

    pub fn is_continual(&self) -> bool {
        matches!(self, ProblemId::ContinualFixed | ProblemId::ContinualMixed)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::FixedChunks => f.write_str("fixed_chunks"),
            ProblemId::LongChunks => f.write_str("long_chunks"),
            ProblemId::Overlap1 => f.write_str("overlap1"),
            ProblemId::Overlap2 => f.write_str("overlap2"),
            ProblemId::Mixed => f.write_str("mixed"),
            ProblemId::ContinualFixed => f.write_str("continual_fixed"),
            ProblemId::ContinualMixed => f.write_str("continual_mixed"),
            ProblemId::GraphFile(p) => write!(f, "graph:{}", p.display()),
        }
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(path) = s.strip_prefix("graph:") {
            if path.is_empty() {
                return Err(Error::Config("graph: problem needs a file path".into()));
            }
            return Ok(ProblemId::GraphFile(PathBuf::from(path)));
        }
        ProblemId::BUILTIN
            .iter()
            .find(|p| p.to_string() == s)
            .cloned()
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown problem {s:?}; expected one of {} or graph:<file.json>",
                    ProblemId::BUILTIN.map(|p| p.to_string()).join(", ")
                ))
            })
    }
}

impl From<ProblemId> for String {
    fn from(p: ProblemId) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for ProblemId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for p in ProblemId::BUILTIN {
            assert_eq!(p.to_string().parse::<ProblemId>().unwrap(), p);
        }
        assert_eq!(
            "graph:songs/a.json".parse::<ProblemId>().unwrap(),
            ProblemId::GraphFile("songs/a.json".into())
        );
        assert!("nope".parse::<ProblemId>().is_err());
        assert!("graph:".parse::<ProblemId>().is_err());
    }

    #[test]
    fn every_builtin_builds_a_schedule() {
        for p in ProblemId::BUILTIN {
            let s = p.schedule(10).unwrap();
            assert_eq!(s.n_tasks(), if p.is_continual() { 2 } else { 1 });
        }
    }
}
