//! PARSER chunking baseline.
//!
//! The stream is read as a succession of percepts. Each percept is built
//! from one to `max_percept_units` consecutive units, where a unit is the
//! longest lexicon entry at or above the shaping threshold that matches the
//! stream at the current position, or a single primitive symbol. After each
//! percept the concatenation is reinforced, every unit decays by
//! `forgetting`, and units sharing a symbol with the percept lose a further
//! `interference`. Units at or below zero weight are dropped.
//!
//! Chunks are read off the lexicon afterwards: shaped units longer than
//! `postprocess_max_n` are discarded, and the rest are grouped greedily by
//! shared symbols, strongest first.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::ChunkAssignment;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParserConfig {
    pub max_percept_units: usize,
    pub gain: f64,
    pub forgetting: f64,
    pub interference: f64,
    pub shaping_threshold: f64,
    pub postprocess_max_n: usize,
}

impl Default for ParserConfig {
    fn default() -> Self {
        Self {
            max_percept_units: 3,
            gain: 1.0,
            forgetting: 0.05,
            interference: 0.005,
            shaping_threshold: 1.0,
            postprocess_max_n: 6,
        }
    }
}

impl ParserConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_percept_units < 1 {
            return Err(Error::Config("max_percept_units must be at least 1".into()));
        }
        for (name, v) in [
            ("gain", self.gain),
            ("forgetting", self.forgetting),
            ("interference", self.interference),
            ("shaping_threshold", self.shaping_threshold),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be a finite non-negative rate, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PerceptLexicon {
    units: HashMap<Vec<usize>, f64>,
    #[serde(skip)]
    max_len: usize,
}

impl PerceptLexicon {
    pub fn weight(&self, unit: &[usize]) -> f64 {
        self.units.get(unit).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.units.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Units sorted by descending weight, ties broken lexicographically.
    pub fn ranked(&self) -> Vec<(Vec<usize>, f64)> {
        let mut v: Vec<_> = self.units.iter().map(|(k, w)| (k.clone(), *w)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        v
    }

    pub fn insert(&mut self, unit: Vec<usize>, weight: f64) {
        self.max_len = self.max_len.max(unit.len());
        self.units.insert(unit, weight);
    }

    /// Longest shaped unit matching `stream` at its start, or the first
    /// primitive.
    fn next_unit<'s>(&self, stream: &'s [usize], threshold: f64) -> &'s [usize] {
        let longest = self.max_len.min(stream.len());
        for len in (2..=longest).rev() {
            let candidate = &stream[..len];
            if self.units.get(candidate).is_some_and(|w| *w >= threshold) {
                return candidate;
            }
        }
        &stream[..1]
    }

    fn learn(&mut self, percept: &[usize], config: &ParserConfig, in_percept: &[bool]) {
        *self.units.entry(percept.to_vec()).or_insert(0.0) += config.gain;
        self.max_len = self.max_len.max(percept.len());
        for (unit, w) in self.units.iter_mut() {
            *w -= config.forgetting;
            if unit.as_slice() != percept && unit.iter().any(|&s| in_percept[s]) {
                *w -= config.interference;
            }
        }
        self.units.retain(|_, w| *w > 0.0);
    }
}

pub fn parser_fit<R: Rng + ?Sized>(
    sequence: &[usize],
    config: &ParserConfig,
    rng: &mut R,
) -> Result<PerceptLexicon> {
    let mut lexicon = PerceptLexicon::default();
    parser_continue(&mut lexicon, sequence, config, rng)?;
    Ok(lexicon)
}

/// Keeps training an existing lexicon on more of the stream.
pub fn parser_continue<R: Rng + ?Sized>(
    lexicon: &mut PerceptLexicon,
    sequence: &[usize],
    config: &ParserConfig,
    rng: &mut R,
) -> Result<()> {
    config.validate()?;
    if sequence.is_empty() {
        return Err(Error::InputDomain("PARSER needs a nonempty sequence".into()));
    }
    let n_symbols = sequence.iter().max().map_or(0, |m| m + 1);
    let mut in_percept = vec![false; n_symbols.max(lexicon.symbol_bound())];
    let mut percept = Vec::new();
    let mut pos = 0;
    while pos < sequence.len() {
        let n_units = rng.random_range(1..=config.max_percept_units);
        percept.clear();
        for _ in 0..n_units {
            if pos >= sequence.len() {
                break;
            }
            let unit = lexicon.next_unit(&sequence[pos..], config.shaping_threshold);
            percept.extend_from_slice(unit);
            pos += unit.len();
        }
        for &s in &percept {
            in_percept[s] = true;
        }
        lexicon.learn(&percept, config, &in_percept);
        for &s in &percept {
            in_percept[s] = false;
        }
    }
    Ok(())
}

impl PerceptLexicon {
    fn symbol_bound(&self) -> usize {
        self.units.keys().flatten().max().map_or(0, |m| m + 1)
    }
}

/// Chunk labels for `n_symbols` symbols from a fitted lexicon.
///
/// Shaped units of two to `postprocess_max_n` symbols are visited by
/// descending weight. A unit touching no existing group opens a new one;
/// otherwise its unclaimed symbols join the first group it touches. Groups
/// are never merged with each other. Symbols covered by no unit stay
/// singletons.
pub fn parser_chunks(lexicon: &PerceptLexicon, n_symbols: usize, config: &ParserConfig) -> ChunkAssignment {
    let mut group: Vec<Option<usize>> = vec![None; n_symbols];
    let mut n_groups = 0;
    for (unit, w) in lexicon.ranked() {
        if w < config.shaping_threshold || unit.len() < 2 || unit.len() > config.postprocess_max_n {
            continue;
        }
        if unit.iter().any(|&s| s >= n_symbols) {
            continue;
        }
        let target = match unit.iter().find_map(|&s| group[s]) {
            Some(g) => g,
            None => {
                n_groups += 1;
                n_groups - 1
            }
        };
        for &s in &unit {
            group[s].get_or_insert(target);
        }
    }
    let ids: Vec<usize> = group
        .iter()
        .enumerate()
        .map(|(s, g)| g.unwrap_or(n_groups + s))
        .collect();
    ChunkAssignment::from_groups(&ids)
}
