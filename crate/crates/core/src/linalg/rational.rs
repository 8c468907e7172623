//! Exact rational kernels and subspaces.
//!
//! Every basis handed out is in canonical form: the nonzero rows of the
//! reduced row echelon form of its span, so each vector has leading
//! coordinate 1 and two bases of the same space are equal element-wise.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::exact;
use super::Side;
use crate::error::{Error, Result};
use crate::matrix::BiregularMatrix;

pub type QVector = Vec<BigRational>;

/// Anything that spans a subspace of `Q^n`.
pub trait Basis {
    fn vectors(&self) -> &[QVector];

    fn dim(&self) -> usize {
        self.vectors().len()
    }
}

impl Basis for Vec<QVector> {
    fn vectors(&self) -> &[QVector] {
        self
    }
}

impl Basis for [QVector] {
    fn vectors(&self) -> &[QVector] {
        self
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KernelBasis {
    pub side: Side,
    pub vectors: Vec<QVector>,
}

impl Basis for KernelBasis {
    fn vectors(&self) -> &[QVector] {
        &self.vectors
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubspaceBasis {
    pub vectors: Vec<QVector>,
}

impl Basis for SubspaceBasis {
    fn vectors(&self) -> &[QVector] {
        &self.vectors
    }
}

/// Reduced row echelon form with pivots normalized to 1.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<QVector>,
    pub pivots: Vec<usize>,
}

fn to_rational(r: exact::IntRref) -> Rref {
    let rows = r
        .rows
        .into_iter()
        .zip(&r.pivots)
        .map(|(row, &p)| {
            let pivot = row[p].clone();
            row.into_iter().map(|x| BigRational::new(x, pivot.clone())).collect()
        })
        .collect();
    Rref { rows, pivots: r.pivots }
}

/// Clears denominators: the primitive integer multiple of `v`.
pub fn integerize(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
}

pub fn rref_int(rows: &[Vec<BigInt>], ncols: usize) -> Rref {
    to_rational(exact::rref(rows, ncols))
}

pub fn rref(vectors: &[QVector], ncols: usize) -> Rref {
    let ints: Vec<Vec<BigInt>> = vectors.iter().map(|v| integerize(v)).collect();
    rref_int(&ints, ncols)
}

/// Right null space of an integer matrix with `ncols` columns, canonical.
pub fn nullspace_int(rows: &[Vec<BigInt>], ncols: usize) -> Vec<QVector> {
    let r = rref_int(rows, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let raw: Vec<QVector> = (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![BigRational::zero(); ncols];
            v[f] = BigRational::one();
            for (row, &p) in r.rows.iter().zip(&r.pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect();
    canonical(&raw, ncols)
}

pub fn nullspace_i64(rows: &[Vec<i64>], ncols: usize) -> Vec<QVector> {
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    nullspace_int(&big, ncols)
}

/// Canonical basis of `span(vectors)`.
pub fn canonical(vectors: &[QVector], ncols: usize) -> Vec<QVector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    rref(vectors, ncols).rows
}

fn ambient<B: Basis + ?Sized>(b: &B) -> Option<usize> {
    b.vectors().first().map(Vec::len)
}

/// Whether two bases span the same subspace.
pub fn spaces_equal<A: Basis + ?Sized, B: Basis + ?Sized>(a: &A, b: &B) -> bool {
    match (ambient(a), ambient(b)) {
        (None, None) => true,
        (None, Some(n)) | (Some(n), None) => {
            // a basis of zero vectors still spans {0}
            let other = if ambient(a).is_none() { b.vectors() } else { a.vectors() };
            canonical(other, n).is_empty()
        }
        (Some(n), Some(m)) => n == m && canonical(a.vectors(), n) == canonical(b.vectors(), n),
    }
}

/// Whether `span(inner) ⊆ span(outer)`.
pub fn span_contains<A: Basis + ?Sized, B: Basis + ?Sized>(outer: &A, inner: &B) -> bool {
    let Some(n) = ambient(inner) else {
        return true;
    };
    let base = canonical(outer.vectors(), n);
    if let Some(m) = ambient(outer) {
        if m != n {
            return false;
        }
    }
    let mut all = base.clone();
    all.extend(inner.vectors().iter().cloned());
    canonical(&all, n).len() == base.len()
}

pub(crate) fn dense_big(a: &BiregularMatrix) -> Vec<Vec<BigInt>> {
    a.to_dense().iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// `ker A` (right) or `ker A^T` (left).
pub fn kernel(a: &BiregularMatrix, side: Side) -> KernelBasis {
    let m = match side {
        Side::Right => a.clone(),
        Side::Left => a.transpose(),
    };
    KernelBasis { side, vectors: nullspace_int(&dense_big(&m), a.n()) }
}

/// Generators of `F = span{R_s : s != i, j} + span{R_i + R_j}`.
pub fn f_generators(a: &BiregularMatrix, i: usize, j: usize) -> Result<Vec<Vec<BigInt>>> {
    a.check_index(i)?;
    a.check_index(j)?;
    if i == j {
        return Err(Error::InvalidParams(format!("F needs two distinct rows, got i = j = {i}")));
    }
    let dense = dense_big(a);
    let mut gens: Vec<Vec<BigInt>> = (0..a.n()).filter(|&s| s != i && s != j).map(|s| dense[s].clone()).collect();
    gens.push(dense[i].iter().zip(&dense[j]).map(|(x, y)| x + y).collect());
    Ok(gens)
}

pub fn f_span(a: &BiregularMatrix, i: usize, j: usize) -> Result<SubspaceBasis> {
    let gens = f_generators(a, i, j)?;
    Ok(SubspaceBasis { vectors: rref_int(&gens, a.n()).rows })
}

/// The orthogonal complement `F^⊥` of [`f_span`].
pub fn f_perp(a: &BiregularMatrix, i: usize, j: usize) -> Result<SubspaceBasis> {
    let gens = f_generators(a, i, j)?;
    Ok(SubspaceBasis { vectors: nullspace_int(&gens, a.n()) })
}

/// `A x`.
pub fn mat_vec(a: &BiregularMatrix, x: &[BigRational]) -> QVector {
    (0..a.n()).map(|s| a.row(s).iter().map(|&t| &x[t as usize]).sum()).collect()
}

/// `x^T A`.
pub fn vec_mat(x: &[BigRational], a: &BiregularMatrix) -> QVector {
    (0..a.n()).map(|t| a.col(t).iter().map(|&s| &x[s as usize]).sum()).collect()
}

pub fn is_zero_vector(v: &[BigRational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `num/den` tokens separated by single spaces.
pub fn format_vector(v: &[BigRational]) -> String {
    let mut out = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{}/{}", x.numer(), x.denom());
    }
    out
}

/// Accepts `num/den` or plain integer tokens.
pub fn parse_vector(line: &str) -> Result<QVector> {
    let mut pos = 1;
    let mut out = Vec::new();
    for tok in line.split_whitespace() {
        let bad = || Error::Parse { line: 1, pos, msg: format!("bad rational token {tok:?}") };
        let x = match tok.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.parse().map_err(|_| bad())?;
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(tok.parse().map_err(|_| bad())?),
        };
        out.push(x);
        pos += tok.len() + 1;
    }
    Ok(out)
}

/// Shorthand for tests and examples: a rational vector from integers.
pub fn qvec(xs: &[i64]) -> QVector {
    xs.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()
}

/// Serializable form of a basis, one `num/den` line per vector.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BasisText {
    pub side: Option<Side>,
    pub vectors: Vec<String>,
}

impl From<&KernelBasis> for BasisText {
    fn from(k: &KernelBasis) -> Self {
        Self { side: Some(k.side), vectors: k.vectors.iter().map(|v| format_vector(v)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bd42() -> BiregularMatrix {
        BiregularMatrix::block_diagonal(2, 2).unwrap()
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel(&BiregularMatrix::identity(4).unwrap(), Side::Right).vectors.is_empty());
        let k = kernel(&bd42(), Side::Right);
        assert_eq!(k.vectors, vec![qvec(&[1, -1, 0, 0]), qvec(&[0, 0, 1, -1])]);
        assert!(kernel(&BiregularMatrix::circulant(3, 2).unwrap(), Side::Right).vectors.is_empty());
    }

    #[test]
    fn f_perp_examples() {
        let fp = f_perp(&BiregularMatrix::identity(3).unwrap(), 0, 1).unwrap();
        assert_eq!(fp.vectors, vec![qvec(&[1, -1, 0])]);
        let fp = f_perp(&bd42(), 0, 1).unwrap();
        assert_eq!(fp.dim(), 2);
        assert!(spaces_equal(&kernel(&bd42(), Side::Right), &fp));
        assert!(f_perp(&bd42(), 1, 1).is_err());
        let c = BiregularMatrix::circulant(7, 3).unwrap();
        assert_eq!(f_perp(&c, 2, 5).unwrap().dim(), 1);
    }

    #[test]
    fn spaces_equal_examples() {
        assert!(spaces_equal(&vec![qvec(&[1, -1, 0])], &vec![qvec(&[-2, 2, 0])]));
        assert!(!spaces_equal(&vec![qvec(&[1, 0, 0])], &vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])]));
        assert!(spaces_equal(&Vec::<QVector>::new(), &vec![qvec(&[0, 0])]));
        assert!(span_contains(&vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])], &vec![qvec(&[3, -5, 0])]));
        assert!(!span_contains(&vec![qvec(&[1, 0, 0])], &vec![qvec(&[0, 0, 1])]));
    }

    #[test]
    fn vector_text_roundtrip() {
        let v = vec![BigRational::new(3.into(), 4.into()), BigRational::from_integer((-2).into())];
        let s = format_vector(&v);
        assert_eq!(s, "3/4 -2/1");
        assert_eq!(parse_vector(&s).unwrap(), v);
        assert_eq!(parse_vector("1 -1 0").unwrap(), qvec(&[1, -1, 0]));
        assert!(parse_vector("1/0").is_err());
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let a = BiregularMatrix::build(5, 2, &[vec![0, 1], vec![0, 1], vec![2, 3], vec![3, 4], vec![2, 4]]).unwrap();
        for side in [Side::Right, Side::Left] {
            let k = kernel(&a, side);
            assert_eq!(k.vectors.len(), 1);
            for x in &k.vectors {
                let y = match side {
                    Side::Right => mat_vec(&a, x),
                    Side::Left => vec_mat(x, &a),
                };
                assert!(is_zero_vector(&y));
                assert!(x.iter().find(|c| !c.is_zero()).unwrap().is_one());
            }
        }
    }
}
