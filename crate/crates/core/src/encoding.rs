//! Exponentially decaying input encoding.
//!
//! Each state presented to the map is held "on" for `tstep` timesteps. Its
//! activation starts at 1 when the state is entered and decays as
//! `exp(-decay_rate * (t - ta))`, where `ta` is the timestep of its most
//! recent activation. Once `t - ta` reaches `memory * tstep` the value is
//! exactly zero, so the encoder only remembers the last `memory` states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub n_states: usize,
    /// Timesteps per state transition.
    pub tstep: u64,
    /// Number of most recent states that stay visible.
    pub memory: u64,
    pub decay_rate: f64,
}

impl EncoderConfig {
    pub fn new(n_states: usize) -> Self {
        Self {
            n_states,
            tstep: 10,
            memory: 2,
            decay_rate: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_states < 2 {
            return Err(Error::Config(format!(
                "encoder needs at least 2 states, got {}",
                self.n_states
            )));
        }
        if self.tstep < 1 {
            return Err(Error::Config("tstep must be at least 1".into()));
        }
        if self.memory < 1 {
            return Err(Error::Config("memory must be at least 1".into()));
        }
        if !(self.decay_rate > 0.0 && self.decay_rate.is_finite()) {
            return Err(Error::Config(format!(
                "decay_rate must be positive and finite, got {}",
                self.decay_rate
            )));
        }
        Ok(())
    }

    /// Elapsed time at which an activation is forgotten.
    pub fn horizon(&self) -> u64 {
        self.memory * self.tstep
    }
}

/// Activation vector at one timestep together with the activation
/// timestamps it was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodedVector {
    pub values: Vec<f64>,
    pub last_activation: Vec<Option<u64>>,
}

impl EncodedVector {
    /// Initial condition: nothing has been presented yet.
    pub fn empty(n_states: usize) -> Self {
        Self {
            values: vec![0.0; n_states],
            last_activation: vec![None; n_states],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != 0.0).count()
    }

    fn advance(&mut self, config: &EncoderConfig, active_state: usize, t: u64) {
        if t.is_multiple_of(config.tstep) || self.last_activation[active_state].is_none() {
            self.last_activation[active_state] = Some(t);
        }
        let horizon = config.horizon();
        for (value, ta) in self.values.iter_mut().zip(self.last_activation.iter_mut()) {
            *value = match *ta {
                Some(at) if t >= at && t - at < horizon => {
                    (-config.decay_rate * (t - at) as f64).exp()
                }
                Some(_) => {
                    *ta = None;
                    0.0
                }
                None => 0.0,
            };
        }
    }
}

fn check_state(config: &EncoderConfig, state: usize) -> Result<()> {
    if state >= config.n_states {
        return Err(Error::InputDomain(format!(
            "state index {state} out of range for {} states",
            config.n_states
        )));
    }
    Ok(())
}

/// Computes the encoding at timestep `t` given the encoding at `t - 1`.
///
/// The active state's timestamp is refreshed when `t` falls on a transition
/// boundary (a multiple of `tstep`).
pub fn encode_step(
    config: &EncoderConfig,
    active_state: usize,
    t: u64,
    previous: &EncodedVector,
) -> Result<EncodedVector> {
    check_state(config, active_state)?;
    if previous.len() != config.n_states {
        return Err(Error::InputDomain(format!(
            "previous vector has {} entries, expected {}",
            previous.len(),
            config.n_states
        )));
    }
    let mut next = previous.clone();
    next.advance(config, active_state, t);
    Ok(next)
}

/// Stateful encoder that advances one timestep per call and reuses its
/// buffer. Timesteps keep counting across task switches.
#[derive(Debug, Clone)]
pub struct Encoder {
    config: EncoderConfig,
    current: EncodedVector,
    t: u64,
}

impl Encoder {
    pub fn new(config: EncoderConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            current: EncodedVector::empty(config.n_states),
            config,
            t: 0,
        })
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    /// Next timestep to be produced.
    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn current(&self) -> &EncodedVector {
        &self.current
    }

    pub fn step(&mut self, active_state: usize) -> Result<&EncodedVector> {
        check_state(&self.config, active_state)?;
        self.current.advance(&self.config, active_state, self.t);
        self.t += 1;
        Ok(&self.current)
    }

    /// Presents one state for `tstep` timesteps, calling `sink` on every
    /// encoded vector.
    pub fn present<F>(&mut self, state: usize, mut sink: F) -> Result<()>
    where
        F: FnMut(&EncodedVector) -> Result<()>,
    {
        check_state(&self.config, state)?;
        // Keep transitions aligned to tstep boundaries even if a caller
        // stepped manually in between.
        while !self.t.is_multiple_of(self.config.tstep) {
            self.t += 1;
        }
        for _ in 0..self.config.tstep {
            self.current.advance(&self.config, state, self.t);
            self.t += 1;
            sink(&self.current)?;
        }
        Ok(())
    }
}

/// Lazily encodes a state sequence, yielding `tstep` vectors per state.
pub struct EncodedSequence<'a> {
    encoder: Encoder,
    states: &'a [usize],
    position: usize,
    sub_step: u64,
}

impl Iterator for EncodedSequence<'_> {
    type Item = EncodedVector;

    fn next(&mut self) -> Option<Self::Item> {
        let state = *self.states.get(self.position)?;
        let v = self.encoder.step(state).ok()?.clone();
        self.sub_step += 1;
        if self.sub_step == self.encoder.config.tstep {
            self.sub_step = 0;
            self.position += 1;
        }
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let tstep = self.encoder.config.tstep as usize;
        let remaining = (self.states.len() - self.position) * tstep - self.sub_step as usize;
        (remaining, Some(remaining))
    }
}

impl ExactSizeIterator for EncodedSequence<'_> {}

pub fn encode_sequence<'a>(
    config: &EncoderConfig,
    states: &'a [usize],
) -> Result<EncodedSequence<'a>> {
    if states.is_empty() {
        return Err(Error::InputDomain("cannot encode an empty sequence".into()));
    }
    for &s in states {
        check_state(config, s)?;
    }
    Ok(EncodedSequence {
        encoder: Encoder::new(*config)?,
        states,
        position: 0,
        sub_step: 0,
    })
}
