//! Task sources and continual schedules.

use rand::Rng;
use serde::Serialize;

use super::graph::{walk_from, TransitionGraph};
use super::long_chunks::LongChunks;
use crate::error::{Error, Result};

/// Anything that can emit a labelled state stream.
#[derive(Debug, Clone)]
pub enum TaskSource {
    Graph(TransitionGraph),
    LongChunks(LongChunks),
}

impl TaskSource {
    pub fn states(&self) -> Vec<String> {
        match self {
            TaskSource::Graph(g) => g.states.clone(),
            TaskSource::LongChunks(l) => l.states(),
        }
    }

    pub fn truth(&self) -> Vec<usize> {
        match self {
            TaskSource::Graph(g) => g.chunk_labels.clone(),
            TaskSource::LongChunks(l) => l.truth(),
        }
    }

    pub fn n_states(&self) -> usize {
        match self {
            TaskSource::Graph(g) => g.n_states(),
            TaskSource::LongChunks(_) => 8,
        }
    }

    /// Emits `n` states. `previous` is the last state emitted by the
    /// preceding task, if any; the stream continues from it.
    fn emit<R: Rng + ?Sized>(&self, n: usize, previous: Option<usize>, rng: &mut R) -> Vec<usize> {
        match self {
            TaskSource::Graph(g) => {
                let first = match previous {
                    Some(p) => g.sample_next(p, rng),
                    None => rng.random_range(0..g.n_states()),
                };
                walk_from(g, first, n, rng)
            }
            TaskSource::LongChunks(l) => l.generate(n, previous, rng),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContinualSchedule {
    pub tasks: Vec<TaskSource>,
    pub samples_per_task: usize,
}

impl ContinualSchedule {
    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn states(&self) -> Vec<String> {
        self.tasks[0].states()
    }

    pub fn n_states(&self) -> usize {
        self.tasks[0].n_states()
    }
}

/// Builds a schedule; every task must use the same state names in the same
/// order.
pub fn make_schedule(tasks: Vec<TaskSource>, samples_per_task: usize) -> Result<ContinualSchedule> {
    let Some(first) = tasks.first() else {
        return Err(Error::Config("a schedule needs at least one task".into()));
    };
    if samples_per_task == 0 {
        return Err(Error::Config("samples_per_task must be positive".into()));
    }
    let states = first.states();
    for (i, t) in tasks.iter().enumerate().skip(1) {
        if t.states() != states {
            return Err(Error::Config(format!(
                "task {} does not share the state set of task 0",
                i
            )));
        }
    }
    Ok(ContinualSchedule {
        tasks,
        samples_per_task,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChunkedSequence {
    pub states: Vec<usize>,
    /// Ground-truth label of every state, one vector per task.
    pub truth: Vec<Vec<usize>>,
    /// Sample indices at which a new task starts.
    pub task_boundaries: Vec<usize>,
}

impl ChunkedSequence {
    /// States of task `k`.
    pub fn task(&self, k: usize) -> &[usize] {
        let start = if k == 0 { 0 } else { self.task_boundaries[k - 1] };
        let end = self
            .task_boundaries
            .get(k)
            .copied()
            .unwrap_or(self.states.len());
        &self.states[start..end]
    }
}

/// Concatenated walks over the schedule's tasks, in order.
pub fn generate<R: Rng + ?Sized>(schedule: &ContinualSchedule, rng: &mut R) -> ChunkedSequence {
    let mut states = Vec::with_capacity(schedule.samples_per_task * schedule.n_tasks());
    let mut boundaries = Vec::new();
    for (k, task) in schedule.tasks.iter().enumerate() {
        if k > 0 {
            boundaries.push(states.len());
        }
        let chunk = task.emit(schedule.samples_per_task, states.last().copied(), rng);
        states.extend(chunk);
    }
    ChunkedSequence {
        states,
        truth: schedule.tasks.iter().map(TaskSource::truth).collect(),
        task_boundaries: boundaries,
    }
}
