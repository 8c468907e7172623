//! Double counting over a finite relation, and the rank-class relations
//! `Q_r ⊆ (E_r ∩ deloc) × E_{r+1}` built on a fully enumerated `A_{n,d}`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::{deloc_event, DelocParams};
use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{BiregularMatrix, MatrixId};
use crate::sampler::{enumerate_all_guarded, SizeGuard};
use crate::switching;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DoubleCount {
    pub relation_size: usize,
    /// `sum_b s_b`
    pub lhs: u128,
    /// `sum_b' t_b'`
    pub rhs: u128,
    pub holds: bool,
}

/// Given `s_b <= |Q(b)|` and `|Q^{-1}(b')| <= t_b'`, checks
/// `sum_b s_b <= sum_b' t_b'`. The key sets of `s` and `t` are `B` and `B'`.
pub fn double_count_check<B, C>(relation: &[(B, C)], s: &HashMap<B, u64>, t: &HashMap<C, u64>) -> Result<DoubleCount>
where
    B: Hash + Eq + Clone + Debug,
    C: Hash + Eq + Clone + Debug,
{
    let pairs: HashSet<&(B, C)> = relation.iter().collect();
    let mut forward: HashMap<&B, u64> = HashMap::new();
    let mut backward: HashMap<&C, u64> = HashMap::new();
    for (b, c) in &pairs {
        if !s.contains_key(b) {
            return Err(Error::Precondition(format!("{b:?} is not in the left set")));
        }
        if !t.contains_key(c) {
            return Err(Error::Precondition(format!("{c:?} is not in the right set")));
        }
        *forward.entry(b).or_default() += 1;
        *backward.entry(c).or_default() += 1;
    }
    for (b, &sb) in s {
        let deg = forward.get(b).copied().unwrap_or(0);
        if sb > deg {
            return Err(Error::Precondition(format!("s = {sb} exceeds |Q({b:?})| = {deg}")));
        }
    }
    for (c, &tc) in t {
        let deg = backward.get(c).copied().unwrap_or(0);
        if deg > tc {
            return Err(Error::Precondition(format!("|Q^-1({c:?})| = {deg} exceeds t = {tc}")));
        }
    }
    let lhs: u128 = s.values().map(|&x| x as u128).sum();
    let rhs: u128 = t.values().map(|&x| x as u128).sum();
    Ok(DoubleCount { relation_size: pairs.len(), lhs, rhs, holds: lhs <= rhs })
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct QrClassStats {
    pub r: usize,
    /// `|E_r ∩ deloc|`
    pub sources: usize,
    /// `|E_{r+1}|`
    pub targets: usize,
    pub edges: usize,
    /// `|Q_r(A)|` value -> number of sources.
    pub forward_hist: BTreeMap<u64, usize>,
    /// `|Q_r^{-1}(Ā)|` value -> number of targets.
    pub backward_hist: BTreeMap<u64, usize>,
    pub forward_min: Option<u64>,
    pub backward_max_deloc: Option<u64>,
    pub backward_max_non_deloc: Option<u64>,
    /// `n (n - 3 theta) d^2 / 2`, reported only.
    pub forward_bound: f64,
    /// `3 n theta d^2 / 2`, reported only.
    pub backward_bound_deloc: f64,
    /// `n (n - d) d^2 / 2`, reported only.
    pub backward_bound_non_deloc: f64,
    pub double_count: DoubleCount,
    /// Edges whose endpoints do not differ in corank by exactly one.
    pub bad_edges: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct QrReport {
    pub n: usize,
    pub d: usize,
    pub c: f64,
    pub theta: f64,
    /// `|E_r|` for `r = 0..=n`.
    pub class_sizes: Vec<usize>,
    /// `|E_r ∩ deloc|` for `r = 0..=n`.
    pub deloc_class_sizes: Vec<usize>,
    pub classes: Vec<QrClassStats>,
    pub violations: u64,
}

pub fn qr_relation_stats(n: usize, d: usize, params: &DelocParams, guard: SizeGuard) -> Result<QrReport> {
    let all: Vec<BiregularMatrix> = enumerate_all_guarded(n, d, guard)?.collect();
    let index: HashMap<MatrixId, usize> = all.iter().enumerate().map(|(k, a)| (a.id(), k)).collect();
    let ranks: Vec<usize> = all.iter().map(linalg::rank_rational).collect();
    let deloc: Vec<bool> = all
        .iter()
        .map(|a| deloc_event(a, params).map(|o| o.holds))
        .collect::<Result<_>>()?;
    let theta = params.theta(n, d);
    let mut class_sizes = vec![0; n + 1];
    let mut deloc_class_sizes = vec![0; n + 1];
    for (k, &r) in ranks.iter().enumerate() {
        class_sizes[r] += 1;
        deloc_class_sizes[r] += usize::from(deloc[k]);
    }

    let (nf, df) = (n as f64, d as f64);
    let mut classes = Vec::new();
    let mut violations = 0;
    for r in 1..n.saturating_sub(1) {
        let sources: Vec<usize> = (0..all.len()).filter(|&k| ranks[k] == r && deloc[k]).collect();
        let targets: Vec<usize> = (0..all.len()).filter(|&k| ranks[k] == r + 1).collect();
        let mut relation = Vec::new();
        let mut bad_edges = 0;
        for &src in &sources {
            let a = &all[src];
            for sw in switching::dedup(&switching::enumerate(a)) {
                let b = switching::apply(a, sw)?;
                let dst = index[&b.id()];
                if ranks[dst] == r + 1 {
                    if linalg::rank_rational(&b) != linalg::rank_rational(a) + 1 {
                        bad_edges += 1;
                    }
                    relation.push((src, dst));
                }
            }
        }
        let mut fwd: HashMap<usize, u64> = sources.iter().map(|&k| (k, 0)).collect();
        let mut bwd: HashMap<usize, u64> = targets.iter().map(|&k| (k, 0)).collect();
        for &(a, b) in &relation {
            *fwd.get_mut(&a).expect("source") += 1;
            *bwd.get_mut(&b).expect("target") += 1;
        }
        let double_count = double_count_check(&relation, &fwd, &bwd)?;
        if !double_count.holds || double_count.lhs != double_count.rhs {
            violations += 1;
        }
        violations += bad_edges as u64;
        let hist = |m: &HashMap<usize, u64>| {
            let mut h = BTreeMap::new();
            for &v in m.values() {
                *h.entry(v).or_insert(0) += 1;
            }
            h
        };
        classes.push(QrClassStats {
            r,
            sources: sources.len(),
            targets: targets.len(),
            edges: relation.len(),
            forward_hist: hist(&fwd),
            backward_hist: hist(&bwd),
            forward_min: fwd.values().copied().min(),
            backward_max_deloc: bwd.iter().filter(|(k, _)| deloc[**k]).map(|(_, &v)| v).max(),
            backward_max_non_deloc: bwd.iter().filter(|(k, _)| !deloc[**k]).map(|(_, &v)| v).max(),
            forward_bound: nf * (nf - 3.0 * theta) * df * df / 2.0,
            backward_bound_deloc: 3.0 * nf * theta * df * df / 2.0,
            backward_bound_non_deloc: nf * (nf - df) * df * df / 2.0,
            double_count,
            bad_edges,
        });
    }
    Ok(QrReport { n, d, c: params.c, theta, class_sizes, deloc_class_sizes, classes, violations })
}
