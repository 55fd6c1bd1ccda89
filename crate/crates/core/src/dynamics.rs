//! The SyncMap weight map and its attraction/repulsion update.
//!
//! Every state owns one point on a `dims`-dimensional map. On each encoded
//! input the states split into a positive set (recently active) and a
//! negative set. Positive points move a fixed step towards the positive
//! centroid; negative points move relative to the negative centroid
//! according to [`NegativeRule`]. All centroids are taken from the
//! pre-update weights, after which the map is rescaled back onto the ball of
//! radius `radius`.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::encoding::{EncodedVector, Encoder, EncoderConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Fixed,
    /// Learning rate multiplied by the number of map nodes.
    ScaledByN,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeRule {
    /// Negative nodes step away from the negative centroid.
    Eq8Literal,
    /// Negative nodes step towards the negative centroid.
    AttractCn,
    /// Each set is attracted to its own centroid and repelled by the other.
    Dipole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Scale every row by `radius / max_row_norm`.
    GlobalRescale,
    /// Project rows outside the ball back onto its surface.
    ClipRows,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsConfig {
    pub alpha: f64,
    pub alpha_mode: AlphaMode,
    pub dims: usize,
    pub radius: f64,
    pub activation_threshold: f64,
    pub epsilon: f64,
    pub negative_rule: NegativeRule,
    pub normalization: Normalization,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            alpha_mode: AlphaMode::Fixed,
            dims: 3,
            radius: 10.0,
            activation_threshold: 0.1,
            epsilon: 1e-8,
            negative_rule: NegativeRule::Eq8Literal,
            normalization: Normalization::GlobalRescale,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.dims < 2 {
            return Err(Error::Config(format!("map needs at least 2 dims, got {}", self.dims)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::Config(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.activation_threshold > 0.0 && self.activation_threshold < 1.0) {
            return Err(Error::Config(format!(
                "activation_threshold must lie in (0, 1), got {}",
                self.activation_threshold
            )));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        Ok(())
    }

    pub fn effective_alpha(&self, n_states: usize) -> f64 {
        match self.alpha_mode {
            AlphaMode::Fixed => self.alpha,
            AlphaMode::ScaledByN => self.alpha * n_states as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncMapState {
    n_states: usize,
    dims: usize,
    /// Row-major `n_states x dims`.
    weights: Vec<f64>,
    /// Updates that actually moved the map (skipped inputs excluded).
    pub step_count: u64,
    /// Encoded inputs presented, including skipped ones.
    pub inputs_seen: u64,
}

impl SyncMapState {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_states = rows.len();
        let dims = rows.first().map_or(0, Vec::len);
        if n_states == 0 || dims == 0 || rows.iter().any(|r| r.len() != dims) {
            return Err(Error::InputDomain("rows must be nonempty and of equal length".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InputDomain("weights must be finite".into()));
        }
        Ok(Self {
            n_states,
            dims,
            weights: rows.concat(),
            step_count: 0,
            inputs_seen: 0,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.dims..(i + 1) * self.dims]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks_exact(self.dims)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn max_row_norm(&self) -> f64 {
        self.rows().map(norm).fold(0.0, f64::max)
    }

    fn normalize(&mut self, radius: f64, mode: Normalization) {
        match mode {
            Normalization::GlobalRescale => {
                let max = self.max_row_norm();
                if max > 0.0 {
                    let scale = radius / max;
                    self.weights.iter_mut().for_each(|w| *w *= scale);
                }
            }
            Normalization::ClipRows => {
                for row in self.weights.chunks_exact_mut(self.dims) {
                    let n = norm(row);
                    if n > radius {
                        let scale = radius / n;
                        row.iter_mut().for_each(|w| *w *= scale);
                    }
                }
            }
        }
    }

    /// Applies one update in place. Returns `false` when the input was
    /// skipped because either activation set had at most one member.
    pub fn apply(&mut self, x: &[f64], config: &DynamicsConfig) -> Result<bool> {
        if x.len() != self.n_states {
            return Err(Error::InputDomain(format!(
                "input has {} entries, map has {} nodes",
                x.len(),
                self.n_states
            )));
        }
        self.inputs_seen += 1;
        let dims = self.dims;
        let mut cp = vec![0.0; dims];
        let mut cn = vec![0.0; dims];
        let (mut n_pos, mut n_neg) = (0usize, 0usize);
        for (i, &xi) in x.iter().enumerate() {
            let (c, count) = if xi > config.activation_threshold {
                (&mut cp, &mut n_pos)
            } else {
                (&mut cn, &mut n_neg)
            };
            *count += 1;
            for (acc, w) in c.iter_mut().zip(self.row(i)) {
                *acc += w;
            }
        }
        if n_pos <= 1 || n_neg <= 1 {
            return Ok(false);
        }
        cp.iter_mut().for_each(|v| *v /= n_pos as f64);
        cn.iter_mut().for_each(|v| *v /= n_neg as f64);

        let alpha = config.effective_alpha(self.n_states);
        let eps = config.epsilon;
        let mut to_p = vec![0.0; dims];
        let mut to_n = vec![0.0; dims];
        for (i, row) in self.weights.chunks_exact_mut(dims).enumerate() {
            let positive = x[i] > config.activation_threshold;
            unit_towards(row, &cp, eps, &mut to_p);
            unit_towards(row, &cn, eps, &mut to_n);
            for d in 0..dims {
                row[d] += alpha
                    * match (positive, config.negative_rule) {
                        (true, NegativeRule::Dipole) => to_p[d] - to_n[d],
                        (true, _) => to_p[d],
                        (false, NegativeRule::Eq8Literal) => -to_n[d],
                        (false, NegativeRule::AttractCn) => to_n[d],
                        (false, NegativeRule::Dipole) => to_n[d] - to_p[d],
                    };
            }
        }
        self.normalize(config.radius, config.normalization);
        if self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NumericFailure {
                step: self.inputs_seen,
                message: "non-finite weight after update".into(),
            });
        }
        self.step_count += 1;
        Ok(true)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Writes `(target - from) / max(|target - from|, eps)` into `out`.
fn unit_towards(from: &[f64], target: &[f64], eps: f64, out: &mut [f64]) {
    let mut sq = 0.0;
    for ((o, t), f) in out.iter_mut().zip(target).zip(from) {
        *o = t - f;
        sq += *o * *o;
    }
    let denom = sq.sqrt().max(eps);
    out.iter_mut().for_each(|o| *o /= denom);
}

/// Positive / negative split of one encoded input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationPartition {
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

pub fn partition(x: &EncodedVector, threshold: f64) -> ActivationPartition {
    let (positive, negative) = (0..x.len()).partition(|&i| x.values[i] > threshold);
    ActivationPartition { positive, negative }
}

/// Centroids of the positive and negative rows, or `None` when either set
/// has at most one member and the step is skipped.
pub fn centroids(
    partition: &ActivationPartition,
    state: &SyncMapState,
) -> Option<(Vec<f64>, Vec<f64>)> {
    if partition.positive.len() <= 1 || partition.negative.len() <= 1 {
        return None;
    }
    let mean = |idx: &[usize]| {
        let mut c = vec![0.0; state.dims];
        for &i in idx {
            for (acc, w) in c.iter_mut().zip(state.row(i)) {
                *acc += w;
            }
        }
        c.iter_mut().for_each(|v| *v /= idx.len() as f64);
        c
    };
    Some((mean(&partition.positive), mean(&partition.negative)))
}

/// Random initial map: rows uniform in `[-radius, radius]^dims`, then
/// rescaled so the largest row sits on the sphere.
pub fn init_map<R: Rng + ?Sized>(
    n_states: usize,
    config: &DynamicsConfig,
    rng: &mut R,
) -> Result<SyncMapState> {
    if n_states < 2 {
        return Err(Error::Config(format!("map needs at least 2 nodes, got {n_states}")));
    }
    config.validate()?;
    let weights = (0..n_states * config.dims)
        .map(|_| rng.random_range(-config.radius..=config.radius))
        .collect();
    let mut state = SyncMapState {
        n_states,
        dims: config.dims,
        weights,
        step_count: 0,
        inputs_seen: 0,
    };
    state.normalize(config.radius, Normalization::GlobalRescale);
    Ok(state)
}

pub fn update_step(
    state: &SyncMapState,
    x: &EncodedVector,
    config: &DynamicsConfig,
) -> Result<SyncMapState> {
    let mut next = state.clone();
    next.apply(&x.values, config)?;
    Ok(next)
}

/// Initializes a map and trains it on an encoded stream.
pub fn fit<'a, I, R>(stream: I, n_states: usize, config: &DynamicsConfig, rng: &mut R) -> Result<SyncMapState>
where
    I: IntoIterator<Item = &'a EncodedVector>,
    R: Rng + ?Sized,
{
    let mut state = init_map(n_states, config, rng)?;
    let mut any = false;
    for x in stream {
        any = true;
        state.apply(&x.values, config)?;
    }
    if !any {
        return Err(Error::InputDomain("cannot fit on an empty stream".into()));
    }
    Ok(state)
}

/// Continues training an existing map without re-initializing it.
pub fn fit_continue<'a, I>(state: &mut SyncMapState, stream: I, config: &DynamicsConfig) -> Result<()>
where
    I: IntoIterator<Item = &'a EncodedVector>,
{
    for x in stream {
        state.apply(&x.values, config)?;
    }
    Ok(())
}

/// Encoder and map advanced together, one state transition at a time.
#[derive(Debug, Clone)]
pub struct SyncMap {
    pub encoder: Encoder,
    pub map: SyncMapState,
    pub config: DynamicsConfig,
}

impl SyncMap {
    pub fn new<R: Rng + ?Sized>(
        encoder: EncoderConfig,
        config: DynamicsConfig,
        rng: &mut R,
    ) -> Result<Self> {
        let map = init_map(encoder.n_states, &config, rng)?;
        Ok(Self {
            encoder: Encoder::new(encoder)?,
            map,
            config,
        })
    }

    pub fn feed(&mut self, states: &[usize]) -> Result<()> {
        let Self {
            encoder,
            map,
            config,
        } = self;
        for &s in states {
            encoder.present(s, |x| map.apply(&x.values, config).map(|_| ()))?;
        }
        Ok(())
    }
}

/// Map snapshot as CSV: `state,label,dim0,...,dimK`.
pub fn snapshot_csv(map: &SyncMapState, names: &[String], labels: &[i64]) -> Result<String> {
    if names.len() != map.n_states() || labels.len() != map.n_states() {
        return Err(Error::InputDomain("names and labels must cover every map node".into()));
    }
    let mut out = String::from("state,label");
    for d in 0..map.dims() {
        let _ = write!(out, ",dim{d}");
    }
    out.push('\n');
    for (i, row) in map.rows().enumerate() {
        let _ = write!(out, "{},{}", names[i], labels[i]);
        for v in row {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    Ok(out)
}
