//! Brute-force reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Textbook DBSCAN written from the definitions: core points have at least
/// `min_pts` points (themselves included) within `eps`; clusters are the
/// connected components of core points; a border point joins the cluster
/// whose lowest-index core point is smallest among its core neighbours.
/// Clusters are numbered by their lowest core index.
pub fn naive_dbscan(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<Option<usize>> {
    let n = points.len();
    let close = |i: usize, j: usize| {
        let d: f64 = points[i]
            .iter()
            .zip(&points[j])
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        d <= eps * eps
    };
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| close(i, j)).count() >= min_pts)
        .collect();
    // Component id of each core point = lowest core index reachable.
    let mut comp: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if !core[i] || comp[i].is_some() {
            continue;
        }
        let mut stack = vec![i];
        comp[i] = Some(i);
        while let Some(p) = stack.pop() {
            for q in 0..n {
                if core[q] && comp[q].is_none() && close(p, q) {
                    comp[q] = Some(i);
                    stack.push(q);
                }
            }
        }
    }
    let mut raw: Vec<Option<usize>> = comp.clone();
    for i in 0..n {
        if !core[i] {
            raw[i] = (0..n).filter(|&j| core[j] && close(i, j)).filter_map(|j| comp[j]).min();
        }
    }
    let mut order: Vec<usize> = comp.iter().flatten().copied().collect();
    order.sort_unstable();
    order.dedup();
    raw.iter()
        .map(|r| r.map(|c| order.iter().position(|&o| o == c).unwrap()))
        .collect()
}

pub fn core_flags(points: &[Vec<f64>], eps: f64, min_pts: usize) -> Vec<bool> {
    let n = points.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    let d: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum();
                    d <= eps * eps
                })
                .count()
                >= min_pts
        })
        .collect()
}

/// NMI from the probability definitions, natural log.
pub fn naive_nmi(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let mut pa: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pb: BTreeMap<usize, f64> = BTreeMap::new();
    let mut pab: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *pa.entry(x).or_default() += 1.0;
        *pb.entry(y).or_default() += 1.0;
        *pab.entry((x, y)).or_default() += 1.0;
    }
    pa.values_mut().for_each(|v| *v /= n);
    pb.values_mut().for_each(|v| *v /= n);
    pab.values_mut().for_each(|v| *v /= n);
    let h = |m: &BTreeMap<usize, f64>| -m.values().map(|p| p * p.ln()).sum::<f64>();
    let (ha, hb) = (h(&pa), h(&pb));
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    if ha == 0.0 || hb == 0.0 {
        return 0.0;
    }
    let i: f64 = pab
        .iter()
        .map(|(&(x, y), &p)| p * (p / (pa[&x] * pb[&y])).ln())
        .sum();
    2.0 * i / (ha + hb)
}
