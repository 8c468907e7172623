//! Membership in the delocalization event on a certified finite subset of
//! the kernel vectors: the canonical bases of `ker A` and `ker A^T` plus the
//! vectors built by [`replay_ka_bound`](super::replay_ka_bound).

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{guard, level_map, replay_ka_bound, DelocParams};
use crate::error::Result;
use crate::linalg::rational::format_vector;
use crate::linalg::{self, Side};
use crate::matrix::BiregularMatrix;

pub const DELOC_SCOPE: &str = "certified subset";

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DelocWitness {
    /// `"right"`, `"left"` or `"replay"`.
    pub origin: String,
    pub vector: String,
    pub lambda: String,
    pub level_set_size: usize,
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct DelocOutcome {
    pub holds: bool,
    pub theta: f64,
    pub c: f64,
    pub vectors_checked: usize,
    /// Largest level set over all checked vectors (0 when none were checked).
    pub max_level_set: usize,
    pub witness: Option<DelocWitness>,
    pub scope: String,
}

pub fn deloc_event(a: &BiregularMatrix, params: &DelocParams) -> Result<DelocOutcome> {
    guard(a)?;
    let theta = params.theta(a.n(), a.d());
    let right = linalg::kernel(a, Side::Right);
    let left = linalg::kernel(a, Side::Left);
    let mut vectors: Vec<(&str, Vec<BigRational>)> = Vec::new();
    vectors.extend(right.vectors.into_iter().map(|v| ("right", v)));
    vectors.extend(left.vectors.into_iter().map(|v| ("left", v)));
    if !vectors.is_empty() {
        let replay = replay_ka_bound(a)?;
        vectors.extend(replay.witness_vectors.into_iter().map(|v| ("replay", v)));
    }

    let mut max_level_set = 0;
    let mut witness = None;
    for (origin, v) in &vectors {
        let levels = level_map(v);
        let (lambda, &size) = levels.iter().max_by_key(|(_, &s)| s).expect("nonempty vector");
        max_level_set = max_level_set.max(size);
        if witness.is_none() && size as f64 > theta {
            witness = Some(DelocWitness {
                origin: origin.to_string(),
                vector: format_vector(v),
                lambda: format_vector(std::slice::from_ref(*lambda)),
                level_set_size: size,
            });
        }
    }
    Ok(DelocOutcome {
        holds: witness.is_none(),
        theta,
        c: params.c,
        vectors_checked: vectors.len(),
        max_level_set,
        witness,
        scope: DELOC_SCOPE.to_string(),
    })
}

/// Largest level set over the canonical bases of both kernels, or `None`
/// for a nonsingular matrix.
pub fn max_kernel_level_set(a: &BiregularMatrix) -> Result<Option<usize>> {
    guard(a)?;
    let mut best = None;
    for side in [Side::Right, Side::Left] {
        for v in linalg::kernel(a, side).vectors {
            let m = level_map(&v).values().copied().max().unwrap_or(0);
            best = Some(best.map_or(m, |b: usize| b.max(m)));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_is_vacuous() {
        let out = deloc_event(&BiregularMatrix::identity(5).unwrap(), &DelocParams::default()).unwrap();
        assert!(out.holds);
        assert_eq!(out.vectors_checked, 0);
        assert_eq!(out.scope, "certified subset");
    }

    #[test]
    fn block_diagonal_violates_small_theta() {
        let a = BiregularMatrix::block_diagonal(2, 2).unwrap();
        // choose C so that theta = 1 exactly: C * 4 * ln^2 2 / ln 4 = 1
        let ln2 = 2f64.ln();
        let c = 4f64.ln() / (4.0 * ln2 * ln2);
        let out = deloc_event(&a, &DelocParams::new(c).unwrap()).unwrap();
        assert!((out.theta - 1.0).abs() < 1e-12);
        assert!(!out.holds);
        let w = out.witness.unwrap();
        assert_eq!(w.vector, "1/1 -1/1 0/1 0/1");
        assert_eq!(w.lambda, "0/1");
        assert_eq!(w.level_set_size, 2);
        assert_eq!(max_kernel_level_set(&a).unwrap(), Some(2));
    }

    #[test]
    fn theta_n_always_holds() {
        let params = DelocParams::new(1e12).unwrap();
        for a in crate::sampler::enumerate_all(4, 2).unwrap() {
            assert!(deloc_event(&a, &params).unwrap().holds);
        }
    }
}
