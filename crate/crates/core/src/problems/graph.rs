//! First-order Markov transition graphs with ground-truth chunk labels, and
//! the JSON graph file format.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionGraph {
    pub states: Vec<String>,
    /// Sparse rows: `(target, probability)` sorted by target.
    rows: Vec<Vec<(usize, f64)>>,
    pub chunk_labels: Vec<usize>,
    /// States whose successor is deterministic.
    pub fixed: Vec<bool>,
}

impl TransitionGraph {
    /// Builds and validates a graph from named states and sparse rows.
    pub fn new(
        states: Vec<String>,
        mut rows: Vec<Vec<(usize, f64)>>,
        chunk_labels: Vec<usize>,
        fixed: Vec<bool>,
    ) -> Result<Self> {
        for row in &mut rows {
            row.sort_by_key(|(t, _)| *t);
        }
        let g = Self {
            states,
            rows,
            chunk_labels,
            fixed,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn row(&self, state: usize) -> &[(usize, f64)] {
        &self.rows[state]
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.rows[from]
            .iter()
            .find(|(t, _)| *t == to)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    /// Row-stochastic and structural checks.
    pub fn validate(&self) -> Result<()> {
        let n = self.states.len();
        if n < 2 {
            return Err(Error::Config(format!("graph needs at least 2 states, got {n}")));
        }
        if self.rows.len() != n || self.chunk_labels.len() != n || self.fixed.len() != n {
            return Err(Error::Config("rows, labels and fixed flags must cover every state".into()));
        }
        let unique: BTreeSet<_> = self.states.iter().collect();
        if unique.len() != n {
            return Err(Error::Config("state names must be unique".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            let name = &self.states[i];
            if row.is_empty() {
                return Err(Error::Config(format!("state {name} has no outgoing transition")));
            }
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Config(format!("state {name} has duplicate edges")));
            }
            for &(t, p) in row {
                if t >= n {
                    return Err(Error::Config(format!("state {name} points at index {t}")));
                }
                if !(p > 0.0 && p <= 1.0 + ROW_TOLERANCE) {
                    return Err(Error::Config(format!(
                        "edge {name} -> {} has probability {p}",
                        self.states[t]
                    )));
                }
            }
            let sum: f64 = row.iter().map(|(_, p)| p).sum();
            if (sum - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Config(format!(
                    "outgoing probabilities of {name} sum to {sum}"
                )));
            }
            if self.fixed[i] && (row.len() != 1 || (row[0].1 - 1.0).abs() > ROW_TOLERANCE) {
                return Err(Error::Config(format!(
                    "fixed state {name} must have exactly one successor with probability 1"
                )));
            }
        }
        Ok(())
    }

    /// Internal and external degree of a state, counting distinct
    /// neighbours in either direction.
    pub fn degrees(&self, state: usize) -> (usize, usize) {
        let mut neighbours = BTreeSet::new();
        for &(t, _) in &self.rows[state] {
            neighbours.insert(t);
        }
        for (from, row) in self.rows.iter().enumerate() {
            if row.iter().any(|(t, _)| *t == state) {
                neighbours.insert(from);
            }
        }
        neighbours.remove(&state);
        let label = self.chunk_labels[state];
        let internal = neighbours
            .iter()
            .filter(|&&j| self.chunk_labels[j] == label)
            .count();
        (internal, neighbours.len() - internal)
    }

    /// Checks `k_int > k_ext` for every probabilistic (non-fixed) state.
    pub fn check_communities(&self) -> Result<()> {
        for i in 0..self.n_states() {
            if self.fixed[i] {
                continue;
            }
            let (k_int, k_ext) = self.degrees(i);
            if k_int <= k_ext {
                return Err(Error::Config(format!(
                    "state {} violates the community condition: internal degree {k_int}, external {k_ext}",
                    self.states[i]
                )));
            }
        }
        Ok(())
    }

    /// Maximal runs of fixed states linked by their unique successors.
    pub fn deterministic_chains(&self) -> Vec<Vec<usize>> {
        let n = self.n_states();
        let has_fixed_pred: Vec<bool> = (0..n)
            .map(|s| (0..n).any(|f| self.fixed[f] && f != s && self.rows[f][0].0 == s))
            .collect();
        let mut chains = Vec::new();
        for start in 0..n {
            if !self.fixed[start] || has_fixed_pred[start] {
                continue;
            }
            let mut chain = vec![start];
            let mut cur = start;
            loop {
                let next = self.rows[cur][0].0;
                if !self.fixed[next] || chain.contains(&next) {
                    break;
                }
                chain.push(next);
                cur = next;
            }
            chains.push(chain);
        }
        chains
    }

    pub fn sample_next<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> usize {
        let row = &self.rows[state];
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for &(t, p) in row {
            acc += p;
            if u < acc {
                return t;
            }
        }
        row[row.len() - 1].0
    }

    /// Serializes to the JSON graph file format.
    pub fn to_json(&self) -> String {
        let file = GraphFile {
            states: self.states.clone(),
            edges: self
                .rows
                .iter()
                .enumerate()
                .flat_map(|(i, row)| {
                    row.iter().map(move |&(t, p)| EdgeSpec {
                        from: self.states[i].clone(),
                        to: self.states[t].clone(),
                        p: Some(p),
                    })
                })
                .collect(),
            chunks: self
                .states
                .iter()
                .cloned()
                .zip(self.chunk_labels.iter().copied())
                .collect(),
            fixed: self
                .states
                .iter()
                .zip(&self.fixed)
                .filter(|(_, f)| **f)
                .map(|(s, _)| s.clone())
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serializes")
    }
}

/// Random walk of `n_samples` states starting from a uniform state.
pub fn random_walk<R: Rng + ?Sized>(
    graph: &TransitionGraph,
    n_samples: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    graph.validate()?;
    let start = rng.random_range(0..graph.n_states());
    Ok(walk_from(graph, start, n_samples, rng))
}

/// Walk whose first element is `first`.
pub(crate) fn walk_from<R: Rng + ?Sized>(
    graph: &TransitionGraph,
    first: usize,
    n_samples: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(n_samples);
    let mut cur = first;
    for _ in 0..n_samples {
        out.push(cur);
        cur = graph.sample_next(cur, rng);
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    states: Vec<String>,
    edges: Vec<EdgeSpec>,
    chunks: std::collections::BTreeMap<String, usize>,
    #[serde(default)]
    fixed: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeSpec {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
}

/// Line (1-based) of the `k`-th occurrence of `needle` in `text`.
fn nth_line(text: &str, needle: &str, k: usize) -> Option<usize> {
    let (pos, _) = text.match_indices(needle).nth(k)?;
    Some(text[..pos].matches('\n').count() + 1)
}

/// Parses a graph file body. `origin` is used in diagnostics.
pub fn parse_graph(text: &str, origin: &Path) -> Result<TransitionGraph> {
    let fail = |line: Option<usize>, message: String| Error::GraphFile {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let file: GraphFile = serde_json::from_str(text)
        .map_err(|e| fail(Some(e.line()), e.to_string()))?;
    let edge_line = |k: usize| nth_line(text, "\"from\"", k);

    let index: HashMap<&str, usize> = file
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    if index.len() != file.states.len() {
        return Err(fail(nth_line(text, "\"states\"", 0), "duplicate state names".into()));
    }
    let n = file.states.len();
    let mut specs: Vec<Vec<(usize, Option<f64>, usize)>> = vec![Vec::new(); n];
    for (k, e) in file.edges.iter().enumerate() {
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| fail(edge_line(k), format!("edge references unknown state {name:?}")))
        };
        let from = lookup(&e.from)?;
        let to = lookup(&e.to)?;
        if specs[from].iter().any(|(t, _, _)| *t == to) {
            return Err(fail(edge_line(k), format!("duplicate edge {} -> {}", e.from, e.to)));
        }
        if let Some(p) = e.p {
            if !(p > 0.0 && p <= 1.0 + ROW_TOLERANCE) {
                return Err(fail(edge_line(k), format!("edge probability {p} outside (0, 1]")));
            }
        }
        specs[from].push((to, e.p, k));
    }

    let mut rows = Vec::with_capacity(n);
    for (i, spec) in specs.iter().enumerate() {
        let name = &file.states[i];
        let Some(&(_, _, first_edge)) = spec.first() else {
            return Err(fail(
                nth_line(text, &format!("\"{name}\""), 0),
                format!("state {name:?} has no outgoing edge"),
            ));
        };
        let given: f64 = spec.iter().filter_map(|(_, p, _)| *p).sum();
        let missing = spec.iter().filter(|(_, p, _)| p.is_none()).count();
        let fill = if missing > 0 {
            let rest = 1.0 - given;
            if rest <= ROW_TOLERANCE {
                return Err(fail(
                    edge_line(first_edge),
                    format!("state {name:?}: no probability mass left for {missing} unweighted edges"),
                ));
            }
            rest / missing as f64
        } else {
            0.0
        };
        let row: Vec<(usize, f64)> = spec.iter().map(|(t, p, _)| (*t, p.unwrap_or(fill))).collect();
        let sum: f64 = row.iter().map(|(_, p)| p).sum();
        if (sum - 1.0).abs() > ROW_TOLERANCE {
            return Err(fail(
                edge_line(first_edge),
                format!("outgoing probabilities of {name:?} sum to {sum}, expected 1"),
            ));
        }
        rows.push(row);
    }

    let mut labels = vec![None; n];
    for (name, &label) in &file.chunks {
        let &i = index.get(name.as_str()).ok_or_else(|| {
            fail(
                nth_line(text, "\"chunks\"", 0),
                format!("chunk label for unknown state {name:?}"),
            )
        })?;
        labels[i] = Some(label);
    }
    let labels = labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| {
                fail(
                    nth_line(text, "\"chunks\"", 0),
                    format!("state {:?} has no chunk label", file.states[i]),
                )
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut fixed = vec![false; n];
    for name in &file.fixed {
        let &i = index.get(name.as_str()).ok_or_else(|| {
            fail(
                nth_line(text, "\"fixed\"", 0),
                format!("fixed list names unknown state {name:?}"),
            )
        })?;
        if rows[i].len() != 1 {
            return Err(fail(
                nth_line(text, "\"fixed\"", 0),
                format!("fixed state {name:?} has {} outgoing edges, expected 1", rows[i].len()),
            ));
        }
        fixed[i] = true;
    }

    TransitionGraph::new(file.states, rows, labels, fixed).map_err(|e| fail(None, e.to_string()))
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<TransitionGraph> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_graph(&text, path)
}

pub(crate) fn bundled(name: &str, text: &str) -> TransitionGraph {
    parse_graph(text, &PathBuf::from(format!("<bundled {name}>")))
        .unwrap_or_else(|e| panic!("bundled graph {name} is invalid: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn parse(text: &str) -> Result<TransitionGraph> {
        parse_graph(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_two_state_file() {
        let g = parse(
            r#"{"states":["a","b"],
                "edges":[{"from":"a","to":"b","p":1.0},{"from":"b","to":"a"}],
                "chunks":{"a":0,"b":0},"fixed":["a"]}"#,
        )
        .unwrap();
        assert_eq!(g.n_states(), 2);
        assert_eq!(g.probability(1, 0), 1.0);
        assert!(g.fixed[0] && !g.fixed[1]);
        let again = parse(&g.to_json()).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn omitted_probabilities_are_uniform() {
        let g = parse(
            r#"{"states":["a","b","c","d"],
                "edges":[{"from":"a","to":"b"},{"from":"a","to":"c"},{"from":"a","to":"d"},
                         {"from":"b","to":"a"},{"from":"c","to":"a"},{"from":"d","to":"a"}],
                "chunks":{"a":0,"b":0,"c":0,"d":0}}"#,
        )
        .unwrap();
        for t in 1..4 {
            assert!((g.probability(0, t) - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn partial_probabilities_share_remaining_mass() {
        let g = parse(
            r#"{"states":["a","b","c"],
                "edges":[{"from":"a","to":"b","p":0.5},{"from":"a","to":"c"},
                         {"from":"b","to":"a"},{"from":"c","to":"a"}],
                "chunks":{"a":0,"b":0,"c":0}}"#,
        )
        .unwrap();
        assert_eq!(g.probability(0, 2), 0.5);
    }

    #[test]
    fn bad_row_sum_reports_line() {
        let err = parse(
            "{\"states\":[\"a\",\"b\"],\n\"edges\":[\n{\"from\":\"a\",\"to\":\"b\",\"p\":0.9},\n{\"from\":\"b\",\"to\":\"a\"}],\n\"chunks\":{\"a\":0,\"b\":0}}",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("test.json:3"), "{msg}");
        assert!(msg.contains("sum to 0.9"), "{msg}");
    }

    #[test]
    fn dangling_reference_and_syntax_errors() {
        let err = parse(
            r#"{"states":["a","b"],"edges":[{"from":"a","to":"z"}],"chunks":{"a":0,"b":0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown state \"z\""));
        let err = parse("{\n\"states\": [\"a\",\n}").unwrap_err();
        assert!(matches!(err, Error::GraphFile { line: Some(_), .. }));
        let err = parse(
            r#"{"states":["a","b"],"edges":[{"from":"a","to":"b"},{"from":"b","to":"a"}],"chunks":{"a":0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("no chunk label"));
        let err = parse(
            r#"{"states":["a","b"],"edges":[{"from":"a","to":"b"}],"chunks":{"a":0,"b":0}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("no outgoing edge"));
    }

    #[test]
    fn fixed_state_with_branching_is_rejected() {
        let err = parse(
            r#"{"states":["a","b","c"],
                "edges":[{"from":"a","to":"b"},{"from":"a","to":"c"},{"from":"b","to":"a"},{"from":"c","to":"a"}],
                "chunks":{"a":0,"b":0,"c":0},"fixed":["a"]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("fixed state"));
    }

    #[test]
    fn alternating_walk() {
        let g = TransitionGraph::new(
            vec!["a".into(), "b".into()],
            vec![vec![(1, 1.0)], vec![(0, 1.0)]],
            vec![0, 0],
            vec![true, true],
        )
        .unwrap();
        let w = random_walk(&g, 50, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(w.windows(2).all(|p| p[0] != p[1]));
    }

    #[test]
    fn constructor_rejects_non_stochastic_rows() {
        let err = TransitionGraph::new(
            vec!["a".into(), "b".into()],
            vec![vec![(1, 0.7)], vec![(0, 1.0)]],
            vec![0, 0],
            vec![false, false],
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }
}
