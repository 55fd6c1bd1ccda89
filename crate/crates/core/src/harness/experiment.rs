use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::worker_pool;
use crate::clustering::{assign_chunks, ChunkAssignment, ClusteringConfig};
use crate::dynamics::{AlphaMode, DynamicsConfig, NegativeRule, SyncMap};
use crate::encoding::EncoderConfig;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, nmi, Summary};
use crate::parser::{parser_chunks, parser_continue, ParserConfig, PerceptLexicon};
use crate::problems::{generate, ContinualSchedule, ProblemId};

pub const SCHEMA_VERSION: u32 = 1;

/// Encoder timesteps per task. One state transition spans `tstep` of them.
pub const DEFAULT_STEPS_PER_TASK: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Syncmap,
    Parser,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Syncmap, Method::Parser];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Syncmap => "syncmap",
            Method::Parser => "parser",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "syncmap" => Ok(Method::Syncmap),
            "parser" => Ok(Method::Parser),
            _ => Err(Error::Config(format!(
                "unknown method {s:?}; expected syncmap or parser"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncodingParams {
    pub tstep: u64,
    pub memory: u64,
    pub decay_rate: f64,
}

impl Default for EncodingParams {
    fn default() -> Self {
        let d = EncoderConfig::new(2);
        Self {
            tstep: d.tstep,
            memory: d.memory,
            decay_rate: d.decay_rate,
        }
    }
}

impl EncodingParams {
    pub fn config(&self, n_states: usize) -> EncoderConfig {
        EncoderConfig {
            n_states,
            tstep: self.tstep,
            memory: self.memory,
            decay_rate: self.decay_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemId,
    pub method: Method,
    pub trials: usize,
    pub seed: u64,
    /// Encoder timesteps per task; the generated stream has
    /// `steps_per_task / tstep` state transitions per task.
    pub steps_per_task: usize,
    pub encoding: EncodingParams,
    pub dynamics: DynamicsConfig,
    pub parser: ParserConfig,
    pub clustering: ClusteringConfig,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemId, method: Method) -> Self {
        Self {
            problem,
            method,
            trials: 30,
            seed: 0,
            steps_per_task: DEFAULT_STEPS_PER_TASK,
            encoding: EncodingParams::default(),
            dynamics: DynamicsConfig::default(),
            parser: ParserConfig::default(),
            clustering: ClusteringConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        self.encoding.config(2).validate()?;
        if (self.steps_per_task as u64) < self.encoding.tstep {
            return Err(Error::Config(format!(
                "steps_per_task ({}) must cover at least one transition of {} steps",
                self.steps_per_task, self.encoding.tstep
            )));
        }
        self.clustering.validate()?;
        match self.method {
            Method::Syncmap => self.dynamics.validate(),
            Method::Parser => self.parser.validate(),
        }
    }

    pub fn transitions_per_task(&self) -> usize {
        self.steps_per_task / self.encoding.tstep.max(1) as usize
    }

    pub fn schedule(&self) -> Result<ContinualSchedule> {
        self.problem.schedule(self.transitions_per_task())
    }

    /// Row label used in comparison tables, e.g. `syncmap(0.1, fixed, 3d)`.
    pub fn label(&self) -> String {
        match self.method {
            Method::Parser => "parser".into(),
            Method::Syncmap => {
                let d = &self.dynamics;
                let mode = match d.alpha_mode {
                    AlphaMode::Fixed => "fixed",
                    AlphaMode::ScaledByN => "out",
                };
                let rule = match d.negative_rule {
                    NegativeRule::Eq8Literal => "",
                    NegativeRule::AttractCn => ", attract_cn",
                    NegativeRule::Dipole => ", dipole",
                };
                format!("syncmap({}, {mode}, {}d{rule})", d.alpha, d.dims)
            }
        }
    }
}

/// Random stream of trial `trial`. Each trial owns a separate ChaCha
/// stream of the experiment seed, so any trial can be rerun alone.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial: usize,
    /// NMI at the end of each task.
    pub scores: Vec<f64>,
    /// Cluster label per state at the end of each task; `-1` is noise.
    pub labels: Vec<Vec<i64>>,
    /// Encoded inputs the map had seen at the end of each task (SyncMap
    /// only). Grows by exactly one task's worth per task.
    pub map_inputs: Vec<u64>,
    /// Seconds spent learning and extracting chunks, excluding generation.
    pub wall_clock_s: f64,
    pub error: Option<String>,
}

impl TrialResult {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub task: usize,
    /// Trials that completed.
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub label: String,
    pub config: ExperimentConfig,
    pub states: Vec<String>,
    /// Ground-truth chunk label per state, per task.
    pub truth: Vec<Vec<usize>>,
    pub trials: Vec<TrialResult>,
    pub summaries: Vec<TaskSummary>,
    pub failed_trials: usize,
    pub timing: Option<Summary>,
    /// SHA-256 over everything except timing fields.
    pub determinism_hash: String,
}

impl ExperimentReport {
    pub fn n_tasks(&self) -> usize {
        self.truth.len()
    }

    /// Scores of completed trials on `task`.
    pub fn scores(&self, task: usize) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.ok())
            .map(|t| t.scores[task])
            .collect()
    }

    pub fn summary(&self, task: usize) -> Option<&TaskSummary> {
        self.summaries.iter().find(|s| s.task == task)
    }

    pub fn wall_clock(&self) -> Vec<f64> {
        self.trials
            .iter()
            .filter(|t| t.ok())
            .map(|t| t.wall_clock_s)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Recomputes the hash from the current contents.
    pub fn compute_hash(&self) -> String {
        #[derive(Serialize)]
        struct View<'a> {
            schema_version: u32,
            label: &'a str,
            config: &'a ExperimentConfig,
            states: &'a [String],
            truth: &'a [Vec<usize>],
            trials: Vec<(usize, &'a [f64], &'a [Vec<i64>], &'a [u64], &'a Option<String>)>,
            summaries: &'a [TaskSummary],
        }
        let view = View {
            schema_version: self.schema_version,
            label: &self.label,
            config: &self.config,
            states: &self.states,
            truth: &self.truth,
            trials: self
                .trials
                .iter()
                .map(|t| (t.trial, &t.scores[..], &t.labels[..], &t.map_inputs[..], &t.error))
                .collect(),
            summaries: &self.summaries,
        };
        let bytes = serde_json::to_vec(&view).expect("report view serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

struct TrialOutcome {
    assignments: Vec<ChunkAssignment>,
    map_inputs: Vec<u64>,
    seconds: f64,
}

fn learn(config: &ExperimentConfig, schedule: &ContinualSchedule, rng: &mut ChaCha8Rng) -> Result<(Vec<Vec<usize>>, TrialOutcome)> {
    let seq = generate(schedule, rng);
    let n = schedule.n_states();
    let start = Instant::now();
    let mut assignments = Vec::with_capacity(schedule.n_tasks());
    let mut map_inputs = Vec::new();
    match config.method {
        Method::Syncmap => {
            let enc = config.encoding.config(n);
            let per_task = |k: usize| seq.task(k).len() as u64 * enc.tstep;
            let mut sm = SyncMap::new(enc, config.dynamics, rng)?;
            for k in 0..schedule.n_tasks() {
                let before = sm.map.inputs_seen;
                sm.feed(seq.task(k))?;
                if sm.map.inputs_seen != before + per_task(k) {
                    return Err(Error::Config(format!(
                        "map input count jumped from {before} to {} during task {k}",
                        sm.map.inputs_seen
                    )));
                }
                map_inputs.push(sm.map.inputs_seen);
                assignments.push(assign_chunks(&sm.map, &config.clustering)?);
            }
        }
        Method::Parser => {
            let mut lexicon = PerceptLexicon::default();
            for k in 0..schedule.n_tasks() {
                parser_continue(&mut lexicon, seq.task(k), &config.parser, rng)?;
                assignments.push(parser_chunks(&lexicon, n, &config.parser));
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64().max(f64::MIN_POSITIVE);
    Ok((
        seq.truth,
        TrialOutcome {
            assignments,
            map_inputs,
            seconds,
        },
    ))
}

/// Runs one trial; failures are captured in the result.
pub fn run_trial(config: &ExperimentConfig, schedule: &ContinualSchedule, trial: usize) -> TrialResult {
    let mut rng = trial_rng(config.seed, trial);
    let scored = learn(config, schedule, &mut rng).and_then(|(truth, out)| {
        let scores = out
            .assignments
            .iter()
            .zip(&truth)
            .map(|(a, t)| nmi(&a.scoring_labels(), t))
            .collect::<Result<Vec<f64>>>()?;
        Ok((scores, out))
    });
    match scored {
        Ok((scores, out)) => TrialResult {
            trial,
            scores,
            labels: out.assignments.iter().map(ChunkAssignment::export_labels).collect(),
            map_inputs: out.map_inputs,
            wall_clock_s: out.seconds,
            error: None,
        },
        Err(e) => TrialResult {
            trial,
            scores: Vec::new(),
            labels: Vec::new(),
            map_inputs: Vec::new(),
            wall_clock_s: 0.0,
            error: Some(e.to_string()),
        },
    }
}

/// Runs every trial of `config` on the worker pool and aggregates them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let schedule = config.schedule()?;
    let pool = worker_pool()?;
    let trials: Vec<TrialResult> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, &schedule, i))
            .collect()
    });
    let n_tasks = schedule.n_tasks();
    let mut summaries = Vec::with_capacity(n_tasks);
    for task in 0..n_tasks {
        let scores: Vec<f64> = trials.iter().filter(|t| t.ok()).map(|t| t.scores[task]).collect();
        if let Ok(s) = aggregate(&scores) {
            summaries.push(TaskSummary {
                task,
                n: scores.len(),
                mean: s.mean,
                std: s.std,
            });
        }
    }
    let times: Vec<f64> = trials.iter().filter(|t| t.ok()).map(|t| t.wall_clock_s).collect();
    let mut report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        label: config.label(),
        config: config.clone(),
        states: schedule.states(),
        truth: schedule.tasks.iter().map(|t| t.truth()).collect(),
        failed_trials: trials.iter().filter(|t| !t.ok()).count(),
        trials,
        summaries,
        timing: aggregate(&times).ok(),
        determinism_hash: String::new(),
    };
    report.determinism_hash = report.compute_hash();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: ProblemId, method: Method) -> ExperimentConfig {
        ExperimentConfig {
            trials: 3,
            steps_per_task: 2_000,
            seed: 7,
            ..ExperimentConfig::new(problem, method)
        }
    }

    #[test]
    fn report_shape() {
        let r = run_experiment(&small(ProblemId::ContinualFixed, Method::Syncmap)).unwrap();
        assert_eq!(r.trials.len(), 3);
        assert_eq!(r.n_tasks(), 2);
        assert_eq!(r.summaries.len(), 2);
        assert_eq!(r.failed_trials, 0);
        for t in &r.trials {
            assert_eq!(t.scores.len(), 2);
            assert_eq!(t.map_inputs, vec![2_000, 4_000]);
            assert!(t.wall_clock_s > 0.0);
            assert!(t.scores.iter().all(|s| (0.0..=1.0).contains(s)));
        }
        assert_eq!(r.determinism_hash, r.compute_hash());
    }

    #[test]
    fn single_trial_has_zero_std() {
        let c = ExperimentConfig {
            trials: 1,
            ..small(ProblemId::FixedChunks, Method::Parser)
        };
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.summaries[0].std, 0.0);
    }

    #[test]
    fn trials_can_be_rerun_alone() {
        let c = small(ProblemId::Overlap1, Method::Syncmap);
        let r = run_experiment(&c).unwrap();
        let schedule = c.schedule().unwrap();
        let again = run_trial(&c, &schedule, 2);
        assert_eq!(again.scores, r.trials[2].scores);
        assert_eq!(again.labels, r.trials[2].labels);
    }

    #[test]
    fn method_ids() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("word2vec".parse::<Method>().is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = small(ProblemId::FixedChunks, Method::Syncmap);
        c.trials = 0;
        assert!(run_experiment(&c).is_err());
        let mut c = small(ProblemId::FixedChunks, Method::Syncmap);
        c.steps_per_task = 5;
        assert!(run_experiment(&c).is_err());
        let mut c = small(ProblemId::FixedChunks, Method::Syncmap);
        c.dynamics.dims = 1;
        assert!(run_experiment(&c).is_err());
    }

    #[test]
    fn labels() {
        let mut c = ExperimentConfig::new(ProblemId::FixedChunks, Method::Syncmap);
        assert_eq!(c.label(), "syncmap(0.1, fixed, 3d)");
        c.dynamics.alpha = 0.001;
        c.dynamics.alpha_mode = AlphaMode::ScaledByN;
        c.dynamics.dims = 2;
        c.dynamics.negative_rule = NegativeRule::Dipole;
        assert_eq!(c.label(), "syncmap(0.001, out, 2d, dipole)");
        c.method = Method::Parser;
        assert_eq!(c.label(), "parser");
    }
}
