//! Executable checks of the switching-method lemmas on concrete matrices.
//!
//! Coordinates are always compared as exact rationals. Indices are 0-based.

mod deloc;
mod double_count;
mod ka;
mod mechanism;

use std::collections::BTreeMap;
use std::time::Instant;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rational::format_vector;
use crate::linalg::{self, DEFAULT_RATIONAL_THRESHOLD};
use crate::matrix::BiregularMatrix;
use crate::switching::{self, Switch};

pub use deloc::{deloc_event, max_kernel_level_set, DelocOutcome, DelocWitness, DELOC_SCOPE};
pub use double_count::{double_count_check, qr_relation_stats, DoubleCount, QrClassStats, QrReport};
pub use ka::{compute_ka, ka_by_rank, replay_ka_bound, KaSet, ReplayReport, RowWitness, WitnessKind};
pub use mechanism::{rank_increasing_switchings, verify_increase_mechanism, MechanismReport};

/// The level-set constant `C` and the derived cap
/// `theta = min(n, C n ln^2 d / ln n)`.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct DelocParams {
    pub c: f64,
}

impl Default for DelocParams {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

impl DelocParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("C must be positive and finite, got {c}")));
        }
        Ok(Self { c })
    }

    pub fn theta(&self, n: usize, d: usize) -> f64 {
        let nf = n as f64;
        if n <= 1 {
            return nf;
        }
        let ln_d = (d as f64).ln();
        (self.c * nf * ln_d * ln_d / nf.ln()).min(nf)
    }
}

/// Sizes of the level sets `{s : x_s = lambda}` of a vector.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LevelSetProfile {
    /// Sorted in decreasing order.
    pub sizes: Vec<usize>,
    pub max_size: usize,
    /// `(lambda as "num/den", size)`, ordered by `lambda`.
    pub values: Vec<(String, usize)>,
}

impl LevelSetProfile {
    pub fn sum_of_squares(&self) -> u128 {
        self.sizes.iter().map(|&s| (s as u128) * (s as u128)).sum()
    }
}

pub(crate) fn level_map(x: &[BigRational]) -> BTreeMap<&BigRational, usize> {
    let mut m = BTreeMap::new();
    for v in x {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

pub fn level_sets(x: &[BigRational]) -> LevelSetProfile {
    let m = level_map(x);
    let mut sizes: Vec<usize> = m.values().copied().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    LevelSetProfile {
        max_size: sizes.first().copied().unwrap_or(0),
        sizes,
        values: m.iter().map(|(k, &v)| (format_vector(std::slice::from_ref(*k)), v)).collect(),
    }
}

/// `rank(apply(A, sw)) - rank(A)`; always in `{-1, 0, 1}`.
pub fn rank_delta_check(a: &BiregularMatrix, sw: Switch) -> Result<i64> {
    let b = switching::apply(a, sw)?;
    Ok(rank_delta_between(a, &b))
}

pub(crate) fn rank_delta_between(a: &BiregularMatrix, b: &BiregularMatrix) -> i64 {
    linalg::rank_rational(b) as i64 - linalg::rank_rational(a) as i64
}

fn check_vector(a: &BiregularMatrix, x: &[BigRational]) -> Result<()> {
    if x.len() != a.n() {
        return Err(Error::Dimension { expected: a.n(), found: x.len() });
    }
    Ok(())
}

/// A switching is x-bad when `x_k = x_l`, i.e. it leaves `A x` unchanged.
pub fn is_x_bad(a: &BiregularMatrix, sw: Switch, x: &[BigRational]) -> Result<bool> {
    check_vector(a, x)?;
    if !switching::can_perform(a, sw)? {
        return Err(Error::InfeasibleSwitch(sw));
    }
    let bad = x[sw.k] == x[sw.l];
    let b = switching::apply(a, sw)?;
    let unchanged = linalg::rational::mat_vec(a, x) == linalg::rational::mat_vec(&b, x);
    if bad != unchanged {
        return Err(Error::ChainViolation(format!("x-bad test disagrees with A x = Ā x at {sw}")));
    }
    Ok(bad)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct XBadCount {
    pub count: u64,
    pub total_switches: u64,
    /// `d^2 * sum_p |L_p|^2`
    pub level_bound: u128,
    /// `n * max_p |L_p| * d^2`
    pub coarse_bound: u128,
}

/// Counts x-bad ordered switchings and checks
/// `count <= d^2 sum_p |L_p|^2 <= n max_p |L_p| d^2`.
pub fn count_x_bad(a: &BiregularMatrix, x: &[BigRational]) -> Result<XBadCount> {
    check_vector(a, x)?;
    let mut count = 0;
    let mut total = 0;
    switching::for_each_switch(a, |sw| {
        total += 1;
        if x[sw.k] == x[sw.l] {
            count += 1;
        }
    });
    let profile = level_sets(x);
    let d2 = (a.d() * a.d()) as u128;
    let out = XBadCount {
        count,
        total_switches: total,
        level_bound: d2 * profile.sum_of_squares(),
        coarse_bound: a.n() as u128 * profile.max_size as u128 * d2,
    };
    if out.count as u128 > out.level_bound || out.level_bound > out.coarse_bound {
        return Err(Error::ChainViolation(format!(
            "{} <= {} <= {} fails",
            out.count, out.level_bound, out.coarse_bound
        )));
    }
    Ok(out)
}

pub(crate) fn guard(a: &BiregularMatrix) -> Result<()> {
    if a.n() > DEFAULT_RATIONAL_THRESHOLD {
        return Err(Error::SizeGuard { n: a.n(), d: a.d() });
    }
    Ok(())
}

/// Uniform JSON report emitted by every verifier sweep.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub params: serde_json::Value,
    pub instances_checked: u64,
    pub violations: u64,
    pub witnesses: Vec<serde_json::Value>,
    pub wall_time_ms: u64,
}

/// At most this many witnesses are kept per report.
pub const MAX_WITNESSES: usize = 16;

impl CheckReport {
    pub fn start(check_name: &str, params: serde_json::Value) -> ReportBuilder {
        ReportBuilder {
            report: CheckReport {
                check_name: check_name.to_string(),
                params,
                instances_checked: 0,
                violations: 0,
                witnesses: Vec::new(),
                wall_time_ms: 0,
            },
            started: Instant::now(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

pub struct ReportBuilder {
    report: CheckReport,
    started: Instant,
}

impl ReportBuilder {
    pub fn checked(&mut self, k: u64) {
        self.report.instances_checked += k;
    }

    pub fn violation(&mut self, witness: serde_json::Value) {
        self.report.violations += 1;
        if self.report.witnesses.len() < MAX_WITNESSES {
            self.report.witnesses.push(witness);
        }
    }

    pub fn finish(mut self) -> CheckReport {
        self.report.wall_time_ms = self.started.elapsed().as_millis() as u64;
        self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rational::qvec;

    fn bd42() -> BiregularMatrix {
        BiregularMatrix::block_diagonal(2, 2).unwrap()
    }

    #[test]
    fn level_set_examples() {
        let p = level_sets(&qvec(&[1, 1, 2]));
        assert_eq!((p.sizes.clone(), p.max_size), (vec![2, 1], 2));
        assert_eq!(p.values, vec![("1/1".to_string(), 2), ("2/1".to_string(), 1)]);
        assert_eq!(level_sets(&qvec(&[5; 6])).sizes, vec![6]);
        let p = level_sets(&qvec(&[1, -1, 0, 0]));
        assert_eq!((p.sizes, p.max_size), (vec![2, 1, 1], 2));
    }

    #[test]
    fn theta_caps_at_n() {
        let p = DelocParams::default();
        assert!(p.theta(60, 2) < 60.0);
        assert_eq!(DelocParams::new(1e9).unwrap().theta(60, 2), 60.0);
        assert_eq!(p.theta(10, 1), 0.0);
        assert!(DelocParams::new(0.0).is_err());
    }

    #[test]
    fn rank_delta_examples() {
        let id = BiregularMatrix::identity(2).unwrap();
        assert_eq!(rank_delta_check(&id, Switch::new(0, 1, 0, 1)).unwrap(), 0);
        let sw = Switch::new(0, 2, 0, 2);
        assert_eq!(rank_delta_check(&bd42(), sw).unwrap(), 1);
        let b = switching::apply(&bd42(), sw).unwrap();
        assert_eq!(rank_delta_check(&b, sw.reverse()).unwrap(), -1);
        assert!(rank_delta_check(&id, Switch::new(0, 0, 0, 1)).is_err());
    }

    #[test]
    fn x_bad_examples() {
        let a = bd42();
        let distinct = qvec(&[1, 2, 3, 4]);
        let constant = qvec(&[7, 7, 7, 7]);
        for sw in switching::enumerate(&a) {
            assert!(!is_x_bad(&a, sw, &distinct).unwrap());
            assert!(is_x_bad(&a, sw, &constant).unwrap());
        }
        let x = qvec(&[1, -1, 0, 0]);
        assert!(!is_x_bad(&a, Switch::new(0, 2, 0, 2), &x).unwrap());
        assert!(matches!(is_x_bad(&a, Switch::new(0, 1, 0, 1), &x), Err(Error::InfeasibleSwitch(_))));
        assert!(matches!(is_x_bad(&a, Switch::new(0, 2, 0, 2), &qvec(&[1])), Err(Error::Dimension { .. })));
    }

    #[test]
    fn count_x_bad_examples() {
        let a = bd42();
        assert_eq!(count_x_bad(&a, &qvec(&[1, 2, 3, 4])).unwrap().count, 0);
        let all = count_x_bad(&a, &qvec(&[0, 0, 0, 0])).unwrap();
        assert_eq!(all.count, 32);
        assert_eq!(all.count, all.total_switches);
        assert_eq!(count_x_bad(&a, &qvec(&[1, -1, 0, 0])).unwrap().count, 0);
    }
}
