//! Long-chunks source: two probabilistic chunks of four symbols with very
//! different visit lengths.
//!
//! Chunk A = {a,b,c,d} is visited for exactly four symbols, emitted as a
//! random permutation of its members. Chunk B = {e,f,g,h} is visited for
//! `5 + U{0..19}` symbols, each drawn uniformly from B excluding the symbol
//! just emitted. The two chunks alternate.

use rand::seq::SliceRandom;
use rand::Rng;

use super::generators::letters;

pub const CHUNK_A: [usize; 4] = [0, 1, 2, 3];
pub const CHUNK_B: [usize; 4] = [4, 5, 6, 7];
pub const LONG_VISIT_MIN: usize = 5;
/// Exclusive upper bound of the random extension of a B visit.
pub const LONG_VISIT_SPAN: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LongChunks;

impl LongChunks {
    pub fn states(&self) -> Vec<String> {
        letters(8)
    }

    pub fn truth(&self) -> Vec<usize> {
        vec![0, 0, 0, 0, 1, 1, 1, 1]
    }

    pub fn chunk_of(state: usize) -> usize {
        usize::from(state >= 4)
    }

    /// One visit of chunk A.
    pub fn visit_a<R: Rng + ?Sized>(rng: &mut R) -> Vec<usize> {
        let mut v = CHUNK_A.to_vec();
        v.shuffle(rng);
        v
    }

    /// One visit of chunk B.
    pub fn visit_b<R: Rng + ?Sized>(rng: &mut R) -> Vec<usize> {
        let len = LONG_VISIT_MIN + rng.random_range(0..LONG_VISIT_SPAN);
        let mut out: Vec<usize> = Vec::with_capacity(len);
        for _ in 0..len {
            let next = match out.last() {
                None => CHUNK_B[rng.random_range(0..4)],
                Some(&prev) => {
                    let others: Vec<usize> = CHUNK_B.iter().copied().filter(|&s| s != prev).collect();
                    others[rng.random_range(0..3)]
                }
            };
            out.push(next);
        }
        out
    }

    /// Emits `n_samples` symbols. `previous` is the symbol emitted just
    /// before (for continuation); the next visit is to the other chunk.
    /// Without it the first chunk is chosen uniformly.
    pub fn generate<R: Rng + ?Sized>(
        &self,
        n_samples: usize,
        previous: Option<usize>,
        rng: &mut R,
    ) -> Vec<usize> {
        let mut in_a = match previous {
            Some(p) => Self::chunk_of(p) == 1,
            None => rng.random_bool(0.5),
        };
        let mut out = Vec::with_capacity(n_samples + LONG_VISIT_MIN + LONG_VISIT_SPAN);
        while out.len() < n_samples {
            let visit = if in_a {
                Self::visit_a(rng)
            } else {
                Self::visit_b(rng)
            };
            out.extend(visit);
            in_a = !in_a;
        }
        out.truncate(n_samples);
        out
    }
}
