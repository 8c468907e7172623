//! Exhaustive lemma sweep over every `A_{n,d}` up to a size limit.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use switchlab::lemmas::{self, CheckReport, MAX_WITNESSES};
use switchlab::linalg::rational::format_vector;
use switchlab::linalg::{self, Side, SubspaceBasis};
use switchlab::sampler::{enumerate_all_guarded, SizeGuard};
use switchlab::switching;
use switchlab::{BiregularMatrix, Error};

use crate::error::CliResult;

pub const CHECKS: [&str; 8] = [
    "switch_count_bounds",
    "rank_delta",
    "increase_mechanism",
    "ka_replay",
    "ka_dual_route",
    "kernel_containment",
    "f_invariance",
    "x_bad_chain",
];

#[derive(Clone, Default)]
struct Tally {
    checked: u64,
    violations: u64,
    witnesses: Vec<Value>,
}

impl Tally {
    fn ok(&mut self) {
        self.checked += 1;
    }

    fn fail(&mut self, witness: Value) {
        self.checked += 1;
        self.violations += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(witness);
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        if ok {
            self.ok()
        } else {
            self.fail(witness())
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.violations += other.violations;
        let room = MAX_WITNESSES.saturating_sub(self.witnesses.len());
        self.witnesses.extend(other.witnesses.into_iter().take(room));
    }
}

/// Every check of the sweep on one matrix. Indices follow [`CHECKS`].
fn check_matrix(a: &BiregularMatrix) -> Vec<Tally> {
    let mut t = vec![Tally::default(); CHECKS.len()];
    let text = a.serialize();
    let w = |detail: Value| json!({ "matrix": text, "detail": detail });

    match switching::count_with_bounds(a) {
        Ok(_) => t[0].ok(),
        Err(e) => t[0].fail(w(json!(e.to_string()))),
    }

    let rank = linalg::rank_rational(a);
    let switches = switching::enumerate(a);
    let mut f_cache: HashMap<(usize, usize), SubspaceBasis> = HashMap::new();
    for &sw in &switches {
        let b = switching::apply(a, sw).expect("enumerated switchings are feasible");
        let delta = linalg::rank_rational(&b) as i64 - rank as i64;
        let back = switching::apply(&b, sw.reverse());
        t[1].check((-1..=1).contains(&delta) && back.as_ref() == Ok(a), || {
            w(json!({ "switch": sw.to_string(), "delta": delta }))
        });

        let fa = f_cache
            .entry((sw.i, sw.j))
            .or_insert_with(|| linalg::f_perp(a, sw.i, sw.j).expect("i != j"));
        let fb = linalg::f_perp(&b, sw.i, sw.j).expect("i != j");
        t[6].check(linalg::spaces_equal(fa, &fb), || w(json!({ "switch": sw.to_string() })));
    }

    let ker = linalg::kernel(a, Side::Right);
    for i in 0..a.n() {
        for j in 0..a.n() {
            if i == j {
                continue;
            }
            let f = f_cache.entry((i, j)).or_insert_with(|| linalg::f_perp(a, i, j).expect("i != j"));
            t[5].check(linalg::span_contains(f, &ker), || w(json!({ "pair": [i, j] })));
        }
    }

    match (lemmas::compute_ka(a), lemmas::ka_by_rank(a)) {
        (Ok(x), Ok(y)) => t[4].check(x == y, || w(json!({ "brute_force": x.len(), "by_rank": y.len() }))),
        (Err(e), _) | (_, Err(e)) => t[4].fail(w(json!(e.to_string()))),
    }

    // x-bad chain on the kernel vectors and on one fixed two-level vector
    let mut vectors = ker.vectors.clone();
    vectors.push(linalg::rational::qvec(&(0..a.n() as i64).map(|s| s % 2).collect::<Vec<_>>()));
    for x in &vectors {
        match lemmas::count_x_bad(a, x) {
            Ok(_) => t[7].ok(),
            Err(e) => t[7].fail(w(json!({ "vector": format_vector(x), "error": e.to_string() }))),
        }
    }

    if rank < a.n() {
        match lemmas::verify_increase_mechanism(a) {
            Ok(r) => t[2].check(r.violations == 0, || w(json!(r.witnesses))),
            Err(e) => t[2].fail(w(json!(e.to_string()))),
        }
        match lemmas::replay_ka_bound(a) {
            Ok(r) => t[3].check(r.is_clean(), || w(serde_json::to_value(&r).unwrap_or(Value::Null))),
            Err(e) => t[3].fail(w(json!(e.to_string()))),
        }
    }
    t
}

/// Runs every check over `A_{n,d}` for `1 <= d <= n <= n_max`, `d <= d_max`.
/// One report per check, in [`CHECKS`] order.
pub fn run_verify(n_max: usize, d_max: usize, guard: SizeGuard, workers: usize) -> CliResult<Vec<CheckReport>> {
    let mut sizes = Vec::new();
    for n in 1..=n_max {
        for d in 1..=d_max.min(n) {
            guard.check(n, d)?;
            sizes.push((n, d));
        }
    }
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let mut totals = vec![Tally::default(); CHECKS.len()];
    for &(n, d) in &sizes {
        let all: Vec<BiregularMatrix> = enumerate_all_guarded(n, d, guard)?.collect();
        let per_matrix: Vec<Vec<Tally>> = pool.install(|| all.par_iter().map(check_matrix).collect());
        for tallies in per_matrix {
            for (total, t) in totals.iter_mut().zip(tallies) {
                total.merge(t);
            }
        }
    }
    let wall_time_ms = started.elapsed().as_millis() as u64;
    let params = json!({ "n_max": n_max, "d_max": d_max, "sizes": sizes });
    Ok(CHECKS
        .iter()
        .zip(totals)
        .map(|(name, t)| CheckReport {
            check_name: name.to_string(),
            params: params.clone(),
            instances_checked: t.checked,
            violations: t.violations,
            witnesses: t.witnesses,
            wall_time_ms,
        })
        .collect())
}

pub fn total_violations(reports: &[CheckReport]) -> u64 {
    reports.iter().map(|r| r.violations).sum()
}

/// Distinguishes a refused size from other failures.
pub fn is_size_guard(e: &crate::error::CliError) -> bool {
    matches!(e, crate::error::CliError::Core(Error::SizeGuard { .. }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_permutation_matrices() {
        let reports = run_verify(2, 1, SizeGuard::default(), 1).unwrap();
        assert_eq!(total_violations(&reports), 0);
        assert_eq!(reports[0].instances_checked, 3); // A_{1,1} plus the two 2x2 permutations
        assert_eq!(reports[2].instances_checked, 0);
    }

    #[test]
    fn up_to_four_by_four() {
        let reports = run_verify(4, 3, SizeGuard::default(), 1).unwrap();
        assert_eq!(reports.len(), CHECKS.len());
        for r in &reports {
            assert_eq!(r.violations, 0, "{r:?}");
        }
        // 1 + (2 + 1) + (6 + 6 + 1) + (24 + 90 + 24)
        assert_eq!(reports[0].instances_checked, 155);
        assert!(reports[2].instances_checked > 0);
    }

    #[test]
    fn refuses_large_sizes() {
        let err = run_verify(9, 2, SizeGuard::default(), 1).unwrap_err();
        assert!(is_size_guard(&err));
    }
}
