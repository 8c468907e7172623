//! Exact rank, kernels and the subspaces `F(A; i, j)`.
//!
//! Rank comes from two modular passes with random 62-bit primes, confirmed by
//! fraction-free integer elimination when `n` is at most the rational
//! threshold. Kernels and everything derived from them are exact rationals;
//! residues are never used for coordinates.

pub mod exact;
pub mod modular;
pub mod rational;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::BiregularMatrix;
use crate::rng;

pub use modular::{rank_mod_p, random_prime};
pub use rational::{
    f_perp, f_span, kernel, spaces_equal, span_contains, Basis, KernelBasis, QVector, SubspaceBasis,
};

pub const DEFAULT_RATIONAL_THRESHOLD: usize = 128;
const DEFAULT_PRIME_SEED: u64 = 0x005e_ed0f_9e1d;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RankReport {
    pub rank: usize,
    pub corank: usize,
    pub primes_used: Vec<u64>,
    pub rationally_confirmed: bool,
}

pub(crate) fn dense(a: &BiregularMatrix) -> Vec<Vec<i64>> {
    a.to_dense().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
}

/// Rank over the rationals by fraction-free elimination.
pub fn rank_rational(a: &BiregularMatrix) -> usize {
    exact::rank(&dense(a), a.n())
}

/// [`rank_exact_with`] with the default threshold and a fixed prime stream.
pub fn rank_exact(a: &BiregularMatrix) -> RankReport {
    rank_exact_with(a, DEFAULT_RATIONAL_THRESHOLD, &mut rng::seeded(DEFAULT_PRIME_SEED))
}

/// Two-prime modular consensus, confirmed rationally when
/// `n <= rational_threshold` or when the primes disagree.
pub fn rank_exact_with<R: Rng + ?Sized>(a: &BiregularMatrix, rational_threshold: usize, rng: &mut R) -> RankReport {
    let n = a.n();
    let m = dense(a);
    let mut primes = vec![random_prime(rng), random_prime(rng)];
    let r1 = modular::rank_mod_p_dense(&m, n, primes[0]);
    let r2 = modular::rank_mod_p_dense(&m, n, primes[1]);
    let (mut rank, force) = if r1 == r2 {
        (r1, false)
    } else {
        // a modular rank never exceeds the rational one; more primes tighten the max
        let mut best = r1.max(r2);
        for _ in 0..2 {
            let p = random_prime(rng);
            primes.push(p);
            best = best.max(modular::rank_mod_p_dense(&m, n, p));
        }
        (best, true)
    };
    let mut rationally_confirmed = false;
    if force || n <= rational_threshold {
        rank = exact::rank(&m, n);
        rationally_confirmed = true;
    }
    RankReport { rank, corank: n - rank, primes_used: primes, rationally_confirmed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{sample_uniform, SamplerConfig};

    #[test]
    fn rank_examples() {
        let r = rank_exact(&BiregularMatrix::identity(7).unwrap());
        assert_eq!((r.rank, r.corank), (7, 0));
        assert!(r.rationally_confirmed);
        assert_eq!(r.primes_used.len(), 2);
        assert_eq!(rank_exact(&BiregularMatrix::block_diagonal(3, 2).unwrap()).rank, 3);
        let mut g = rng::seeded(8);
        let cfg = SamplerConfig::stub(100, 0);
        for n in [3, 10, 40] {
            let a = sample_uniform(n, 1, &cfg, &mut g).unwrap();
            assert_eq!(rank_exact(&a).rank, n);
        }
    }

    #[test]
    fn above_threshold_uses_consensus() {
        let a = BiregularMatrix::circulant(9, 3).unwrap();
        let r = rank_exact_with(&a, 4, &mut rng::seeded(1));
        assert!(!r.rationally_confirmed);
        assert_eq!(r.rank, rank_rational(&a));
        // circulant(9,3) has eigenvalue 1 + w + w^2 = 0 at w = exp(2 pi i/3), twice
        assert_eq!(r.rank, 7);
    }
}
