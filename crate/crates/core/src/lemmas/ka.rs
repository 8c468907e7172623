//! The pair set `K_A = {(i, j) : i != j, ker A = F(A; i, j)^⊥}` and the
//! witness construction behind its lower bound.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::guard;
use crate::error::{Error, Result};
use crate::linalg::exact;
use crate::linalg::rational::{self, format_vector, is_zero_vector, nullspace_i64, vec_mat};
use crate::linalg::{self, Side};
use crate::matrix::BiregularMatrix;

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct KaSet {
    pub pairs: BTreeSet<(usize, usize)>,
}

impl KaSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.pairs.contains(&(i, j))
    }
}

/// Brute force over all ordered pairs, comparing `ker A` with `F^⊥`.
pub fn compute_ka(a: &BiregularMatrix) -> Result<KaSet> {
    guard(a)?;
    let ker = linalg::kernel(a, Side::Right);
    let mut pairs = BTreeSet::new();
    for i in 0..a.n() {
        for j in 0..a.n() {
            if i != j && linalg::spaces_equal(&ker, &linalg::f_perp(a, i, j)?) {
                pairs.insert((i, j));
            }
        }
    }
    Ok(KaSet { pairs })
}

/// Second route to `K_A`: since `ker A ⊆ F^⊥` always holds, equality is
/// the same as `dim F(A; i, j) = rank A`. Uses only integer ranks.
pub fn ka_by_rank(a: &BiregularMatrix) -> Result<KaSet> {
    guard(a)?;
    let n = a.n();
    let dense: Vec<Vec<i64>> = a.to_dense().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let rank = exact::rank(&dense, n);
    let mut pairs = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut gens: Vec<Vec<i64>> = (0..n).filter(|&s| s != i && s != j).map(|s| dense[s].clone()).collect();
            gens.push(dense[i].iter().zip(&dense[j]).map(|(x, y)| x + y).collect());
            if exact::rank(&gens, n) == rank {
                pairs.insert((i, j));
            }
        }
    }
    Ok(KaSet { pairs })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum WitnessKind {
    /// corank >= 2: `J(i) = supp z` for a left null vector `z` with `z_i = 0`
    J,
    /// corank 1: `L(i) = {j : x_j != -1}` where `x^T A = 0` and `x_i = -1`
    L,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct RowWitness {
    pub i: usize,
    pub kind: WitnessKind,
    /// The vector `z` or `x`, as `num/den` tokens.
    pub vector: String,
    pub set: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ReplayReport {
    pub corank: usize,
    /// The left null vector `y`.
    pub y: String,
    /// `I = supp y`
    pub support: Vec<usize>,
    pub rows: Vec<RowWitness>,
    pub certified_pairs: Vec<(usize, usize)>,
    /// Certified pairs that `compute_ka` does not contain (must be empty).
    pub unconfirmed_pairs: Vec<(usize, usize)>,
    pub ka_size: usize,
    /// `|I| * min_i |J(i) or L(i)|`
    pub bound: usize,
    pub bound_holds: bool,
    /// Rows `i in I` with `rank A^i != rank A` (must be empty).
    pub rank_drops: Vec<usize>,
    #[serde(skip)]
    pub witness_vectors: Vec<Vec<BigRational>>,
}

impl ReplayReport {
    pub fn is_clean(&self) -> bool {
        self.unconfirmed_pairs.is_empty() && self.bound_holds && self.rank_drops.is_empty()
    }
}

fn support(v: &[BigRational]) -> Vec<usize> {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(s, _)| s).collect()
}

/// Rebuilds the witnesses `y`, `I`, `J(i)` / `L(i)` for a singular matrix and
/// checks every certified pair against [`compute_ka`].
pub fn replay_ka_bound(a: &BiregularMatrix) -> Result<ReplayReport> {
    guard(a)?;
    let n = a.n();
    let dense: Vec<Vec<i64>> = a.to_dense().iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
    let rank = exact::rank(&dense, n);
    let corank = n - rank;
    if corank == 0 {
        return Err(Error::NotSingular);
    }
    let left = linalg::kernel(a, Side::Left);
    let y = left
        .vectors
        .first()
        .cloned()
        .ok_or_else(|| Error::WitnessConstruction("singular matrix with empty left kernel".into()))?;
    let big_i = support(&y);
    let mut rows = Vec::with_capacity(big_i.len());
    let mut rank_drops = Vec::new();
    let mut witness_vectors = vec![y.clone()];

    for &i in &big_i {
        // A^i: row i replaced by zeros
        let mut zeroed = dense.clone();
        zeroed[i] = vec![0; n];
        if exact::rank(&zeroed, n) != rank {
            rank_drops.push(i);
        }
        let (kind, vector, set) = if corank >= 2 {
            let transposed: Vec<Vec<i64>> = (0..n).map(|t| (0..n).map(|s| zeroed[s][t]).collect()).collect();
            let z = nullspace_i64(&transposed, n)
                .into_iter()
                .map(|mut v| {
                    v[i] = BigRational::zero();
                    v
                })
                .find(|v| !is_zero_vector(v))
                .ok_or_else(|| Error::WitnessConstruction(format!("no left null vector of A^{i} vanishing at {i}")))?;
            if !is_zero_vector(&vec_mat(&z, a)) {
                return Err(Error::WitnessConstruction(format!("z for row {i} is not in ker A^T")));
            }
            let set = support(&z);
            (WitnessKind::J, z, set)
        } else {
            // x = -y / y_i, so x_i = -1 and R_i = sum_{s != i} x_s R_s
            let scale = -y[i].recip();
            let x: Vec<BigRational> = y.iter().map(|v| v * &scale).collect();
            let minus_one = -BigRational::one();
            let set = (0..n).filter(|&j| x[j] != minus_one).collect();
            (WitnessKind::L, x, set)
        };
        rows.push(RowWitness { i, kind, vector: rational::format_vector(&vector), set });
        witness_vectors.push(vector);
    }

    let ka = compute_ka(a)?;
    let certified_pairs: Vec<(usize, usize)> =
        rows.iter().flat_map(|w| w.set.iter().map(move |&j| (w.i, j))).collect();
    let unconfirmed_pairs = certified_pairs.iter().copied().filter(|&(i, j)| !ka.contains(i, j)).collect();
    let min_set = rows.iter().map(|w| w.set.len()).min().unwrap_or(0);
    let bound = big_i.len() * min_set;
    Ok(ReplayReport {
        corank,
        y: format_vector(&y),
        support: big_i,
        rows,
        certified_pairs,
        unconfirmed_pairs,
        ka_size: ka.len(),
        bound,
        bound_holds: ka.len() >= bound,
        rank_drops,
        witness_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::enumerate_all;

    #[test]
    fn full_rank_has_empty_ka() {
        let a = BiregularMatrix::circulant(5, 2).unwrap();
        assert!(compute_ka(&a).unwrap().is_empty());
        assert!(ka_by_rank(&a).unwrap().is_empty());
        assert!(matches!(replay_ka_bound(&a), Err(Error::NotSingular)));
    }

    #[test]
    fn block_diagonal_ka() {
        let a = BiregularMatrix::block_diagonal(2, 2).unwrap();
        let ka = compute_ka(&a).unwrap();
        // any two remaining rows plus R_i + R_j already span both blocks
        let expect: BTreeSet<_> = (0..4).flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        assert_eq!(ka.pairs, expect);
        assert_eq!(ka_by_rank(&a).unwrap(), ka);
    }

    #[test]
    fn block_diagonal_replay() {
        let a = BiregularMatrix::block_diagonal(2, 2).unwrap();
        let r = replay_ka_bound(&a).unwrap();
        assert_eq!(r.y, "1/1 -1/1 0/1 0/1");
        assert_eq!(r.support, vec![0, 1]);
        // the only left null vector vanishing at 0 (or 1) is (0, 0, 1, -1),
        // so (0, 1) is in K_A but not certified by this construction
        assert_eq!(r.certified_pairs, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert_eq!(r.bound, 4);
        assert_eq!(r.ka_size, 12);
        assert!(r.is_clean(), "{r:?}");
    }

    #[test]
    fn both_routes_agree_on_a42() {
        for a in enumerate_all(4, 2).unwrap() {
            assert_eq!(compute_ka(&a).unwrap(), ka_by_rank(&a).unwrap(), "{a:?}");
        }
    }
}
