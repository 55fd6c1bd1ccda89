//! Built-in benchmark graphs.

use super::graph::{bundled, TransitionGraph};
use crate::error::{Error, Result};

const MIXED: &str = include_str!("../../data/mixed.json");
const CONTINUAL_MIXED_TASK2: &str = include_str!("../../data/continual_mixed_task2.json");

pub(crate) fn letters(n: usize) -> Vec<String> {
    (0..n).map(|i| char::from(b'a' + i as u8).to_string()).collect()
}

/// Deterministic chunks over named states. Inside a chunk each member
/// leads to the next with probability 1; the last member moves to the
/// first member of one of the other chunks, uniformly.
pub fn fixed_chunks_graph(states: Vec<String>, chunks: &[&[&str]]) -> Result<TransitionGraph> {
    let n = states.len();
    let idx = |name: &str| {
        states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::Config(format!("unknown state {name:?}")))
    };
    let chunks: Vec<Vec<usize>> = chunks
        .iter()
        .map(|c| c.iter().map(|s| idx(s)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if chunks.len() < 2 {
        return Err(Error::Config("need at least two chunks".into()));
    }
    let mut rows = vec![Vec::new(); n];
    let mut labels = vec![usize::MAX; n];
    let mut fixed = vec![false; n];
    for (c, members) in chunks.iter().enumerate() {
        for (k, &s) in members.iter().enumerate() {
            if labels[s] != usize::MAX {
                return Err(Error::Config(format!("state {} in two chunks", states[s])));
            }
            labels[s] = c;
            if k + 1 < members.len() {
                rows[s] = vec![(members[k + 1], 1.0)];
                fixed[s] = true;
            } else {
                let p = 1.0 / (chunks.len() - 1) as f64;
                rows[s] = chunks
                    .iter()
                    .enumerate()
                    .filter(|(o, _)| *o != c)
                    .map(|(_, other)| (other[0], p))
                    .collect();
            }
        }
    }
    if labels.contains(&usize::MAX) {
        return Err(Error::Config("every state must belong to a chunk".into()));
    }
    TransitionGraph::new(states, rows, labels, fixed)
}

/// Four fixed chunks of three states: (a,b,c), (d,e,f), (g,h,i), (j,k,l).
pub fn gen_fixed_chunks() -> TransitionGraph {
    fixed_chunks_graph(
        letters(12),
        &[&["a", "b", "c"], &["d", "e", "f"], &["g", "h", "i"], &["j", "k", "l"]],
    )
    .expect("fixed chunk graph is valid")
}

/// Second task of the continual fixed problem: the same twelve states
/// regrouped as (a,k,i), (g,e,j), (d,h,c), (f,b,l).
pub fn gen_fixed_chunks_permuted() -> TransitionGraph {
    fixed_chunks_graph(
        letters(12),
        &[&["a", "k", "i"], &["g", "e", "j"], &["d", "h", "c"], &["f", "b", "l"]],
    )
    .expect("permuted fixed chunk graph is valid")
}

/// Overlapping probabilistic chunks.
///
/// Variant 1: chunks {a..e} and {d..h}. Variant 2: chunks {a..e} and
/// {a..j}. From a state, one of the chunks containing it is picked
/// uniformly, then the next state is drawn uniformly from the other members
/// of that chunk. Shared states carry the label of the first chunk.
pub fn gen_overlap(variant: u8) -> Result<TransitionGraph> {
    let (n, chunks): (usize, Vec<Vec<usize>>) = match variant {
        1 => (8, vec![(0..5).collect(), (3..8).collect()]),
        2 => (10, vec![(0..5).collect(), (0..10).collect()]),
        v => return Err(Error::Config(format!("unknown overlap variant {v}"))),
    };
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for s in 0..n {
        let containing: Vec<&Vec<usize>> = chunks.iter().filter(|c| c.contains(&s)).collect();
        labels.push(chunks.iter().position(|c| c.contains(&s)).expect("covered"));
        let mut probs = vec![0.0; n];
        for chunk in &containing {
            let others = chunk.iter().filter(|&&t| t != s);
            let p = 1.0 / ((chunk.len() - 1) * containing.len()) as f64;
            for &t in others {
                probs[t] += p;
            }
        }
        rows.push(
            probs
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 0.0)
                .collect(),
        );
    }
    TransitionGraph::new(letters(n), rows, labels, vec![false; n])
}

/// Mixed structure: two probabilistic communities and one deterministic
/// chain. The topology is a reconstruction with communities {a,b,c,d} and
/// {e,f,g,h} (complete inside) and the chain i -> j -> k.
pub fn gen_mixed() -> TransitionGraph {
    bundled("mixed", MIXED)
}

/// Second task of the continual mixed problem: the mixed topology with
/// b/f, d/j and g/k swapped.
pub fn gen_mixed_task2() -> TransitionGraph {
    bundled("continual_mixed_task2", CONTINUAL_MIXED_TASK2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_chunks_structure() {
        let g = gen_fixed_chunks();
        assert_eq!(g.n_states(), 12);
        let mut labels = g.chunk_labels.clone();
        labels.dedup();
        assert_eq!(labels, vec![0, 1, 2, 3]);
        for s in 0..12 {
            if s % 3 < 2 {
                assert_eq!(g.row(s), &[(s + 1, 1.0)]);
                assert!(g.fixed[s]);
            } else {
                assert_eq!(g.row(s).len(), 3);
                assert!(g.row(s).iter().all(|(t, p)| *p == 1.0 / 3.0 && t % 3 == 0 && t / 3 != s / 3));
            }
        }
    }

    #[test]
    fn permuted_task_scatters_every_chunk() {
        let t1 = gen_fixed_chunks();
        let t2 = gen_fixed_chunks_permuted();
        assert_eq!(t1.states, t2.states);
        for c in 0..4 {
            let members: Vec<usize> = (0..12).filter(|&s| t1.chunk_labels[s] == c).collect();
            let mut new: Vec<usize> = members.iter().map(|&s| t2.chunk_labels[s]).collect();
            new.sort();
            new.dedup();
            assert_eq!(new.len(), 3, "chunk {c}");
        }
        let a = t2.index_of("a").unwrap();
        let k = t2.index_of("k").unwrap();
        assert_eq!(t2.row(a), &[(k, 1.0)]);
    }

    #[test]
    fn overlap_variants() {
        let g1 = gen_overlap(1).unwrap();
        assert_eq!(g1.n_states(), 8);
        assert_eq!(g1.chunk_labels, vec![0, 0, 0, 0, 0, 1, 1, 1]);
        // d sits in both chunks: 1/8 to each of a,b,c,f,g,h and 1/4 to e.
        assert!((g1.probability(3, 4) - 0.25).abs() < 1e-15);
        assert!((g1.probability(3, 0) - 0.125).abs() < 1e-15);
        assert_eq!(g1.probability(0, 5), 0.0);

        let g2 = gen_overlap(2).unwrap();
        assert_eq!(g2.n_states(), 10);
        assert_eq!(g2.chunk_labels, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert!((g2.probability(9, 0) - 1.0 / 9.0).abs() < 1e-15);
        assert!(gen_overlap(3).is_err());
    }

    #[test]
    fn mixed_reconstruction() {
        let g = gen_mixed();
        g.check_communities().unwrap();
        let chains = g.deterministic_chains();
        assert_eq!(chains.len(), 1);
        let names: Vec<&str> = chains[0].iter().map(|&s| g.states[s].as_str()).collect();
        assert_eq!(names, vec!["i", "j", "k"]);
        let mut labels = g.chunk_labels.clone();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 3);
    }

    #[test]
    fn continual_mixed_swaps_members() {
        let t1 = gen_mixed();
        let t2 = gen_mixed_task2();
        assert_eq!(t1.states, t2.states);
        t2.check_communities().unwrap();
        assert_eq!(t2.deterministic_chains().len(), 1);
        let moved = (0..t1.n_states())
            .filter(|&s| t1.chunk_labels[s] != t2.chunk_labels[s])
            .count();
        assert_eq!(moved, 6);
    }
}
