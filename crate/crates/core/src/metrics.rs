//! Partition scoring and simple statistics over trial scores.

use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

fn dense_ids<L: Eq + Hash>(labels: &[L]) -> Vec<usize> {
    let mut ids: HashMap<&L, usize> = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(l).or_insert(next)
        })
        .collect()
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Normalized mutual information `2 I(P;T) / (H(P) + H(T))`, in nats.
///
/// Two single-cluster partitions score 1; if only one of them has zero
/// entropy the score is 0.
pub fn nmi<A, B>(predicted: &[A], truth: &[B]) -> Result<f64>
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    if predicted.len() != truth.len() {
        return Err(Error::InputDomain(format!(
            "label lengths differ: {} vs {}",
            predicted.len(),
            truth.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::InputDomain("cannot score empty partitions".into()));
    }
    let n = predicted.len() as f64;
    // Dense ids by first occurrence keep the summation order independent
    // of hashing, so scores are bit-for-bit reproducible.
    let pi = dense_ids(predicted);
    let ti = dense_ids(truth);
    let mut pc = vec![0usize; pi.iter().max().map_or(0, |m| m + 1)];
    let mut tc = vec![0usize; ti.iter().max().map_or(0, |m| m + 1)];
    let mut joint_id: HashMap<(usize, usize), usize> = HashMap::new();
    let mut joint: Vec<((usize, usize), usize)> = Vec::new();
    for (&a, &b) in pi.iter().zip(&ti) {
        pc[a] += 1;
        tc[b] += 1;
        let k = *joint_id.entry((a, b)).or_insert_with(|| {
            joint.push(((a, b), 0));
            joint.len() - 1
        });
        joint[k].1 += 1;
    }
    let hp = entropy(pc.iter().copied(), n);
    let ht = entropy(tc.iter().copied(), n);
    match (pc.len() == 1, tc.len() == 1) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let mi: f64 = joint
        .iter()
        .map(|&((a, b), c)| {
            let pab = c as f64 / n;
            let pa = pc[a] as f64 / n;
            let pb = tc[b] as f64 / n;
            pab * (pab / (pa * pb)).ln()
        })
        .sum();
    Ok((2.0 * mi / (hp + ht)).clamp(0.0, 1.0))
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

/// Two-sided Welch t-test p-value.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InputDomain("each sample needs at least 2 values".into()));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se2 = sa + sb;
    if se2 == 0.0 {
        return Ok(if ma == mb { 1.0 } else { 0.0 });
    }
    let t = (ma - mb) / se2.sqrt();
    let df = se2 * se2
        / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::InputDomain(format!("t distribution: {e}")))?;
    Ok((2.0 * dist.sf(t.abs())).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n - 1); 0 for a single score.
    pub std: f64,
}

pub fn aggregate(scores: &[f64]) -> Result<Summary> {
    if scores.is_empty() {
        return Err(Error::InputDomain("cannot aggregate zero scores".into()));
    }
    let (mean, var) = mean_var(scores);
    Ok(Summary {
        mean,
        std: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmi_reference_values() {
        assert_eq!(nmi(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().abs() < 1e-12);
        let v = nmi(&[0, 0, 1, 1], &[0, 0, 0, 1]).unwrap();
        assert!((v - 0.343_711_018_485_450_8).abs() < 1e-9, "{v}");
    }

    #[test]
    fn nmi_zero_entropy_conventions() {
        assert_eq!(nmi(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 2]).unwrap(), 0.0);
        assert_eq!(nmi(&[0, 1, 2], &[5, 5, 5]).unwrap(), 0.0);
    }

    #[test]
    fn nmi_errors() {
        assert!(nmi(&[0, 1], &[0]).is_err());
        assert!(nmi::<u8, u8>(&[], &[]).is_err());
    }

    #[test]
    fn welch_identical_and_symmetric() {
        let a = [0.1, 0.5, 0.3, 0.9];
        assert_eq!(welch_t_test(&a, &a).unwrap(), 1.0);
        let b = [0.2, 0.25, 0.3];
        assert_eq!(welch_t_test(&a, &b).unwrap(), welch_t_test(&b, &a).unwrap());
        assert_eq!(welch_t_test(&[1.0, 1.0], &[1.0, 1.0]).unwrap(), 1.0);
        assert_eq!(welch_t_test(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 0.0);
        assert!(welch_t_test(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn welch_textbook_value() {
        // scipy.stats.ttest_ind([1,2,3,4,5],[2,4,6,8,10,12], equal_var=False)
        let p = welch_t_test(&[1.0, 2.0, 3.0, 4.0, 5.0], &[2.0, 4.0, 6.0, 8.0, 10.0, 12.0]).unwrap();
        assert!((p - 0.049_284_338_206_730_49).abs() < 1e-6, "{p}");
    }

    #[test]
    fn aggregate_values() {
        assert_eq!(aggregate(&[1.0]).unwrap(), Summary { mean: 1.0, std: 0.0 });
        let s = aggregate(&[0.0, 1.0]).unwrap();
        assert_eq!(s.mean, 0.5);
        assert!((s.std - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(aggregate(&[0.4; 5]).unwrap().std, 0.0);
        assert!(aggregate(&[]).is_err());
    }
}
