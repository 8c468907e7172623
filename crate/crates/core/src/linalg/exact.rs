//! Fraction-free elimination over the integers.
//!
//! Both routines first run on `i128` with checked arithmetic and restart on
//! `BigInt` if anything overflows, so the common small case never allocates
//! per entry.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) trait Ring: Clone + PartialEq {
    fn to_bigint(&self) -> BigInt;
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a * b - c * e`, `None` on overflow.
    fn cross(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self>;
    fn div_exact(&self, by: &Self) -> Self;
    fn gcd(&self, other: &Self) -> Self;
    fn is_negative(&self) -> bool;
    fn neg(&self) -> Self;
    fn bits(&self) -> u64;
}

impl Ring for i128 {
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn cross(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*e)?).filter(|&x| x != i128::MIN)
    }
    fn div_exact(&self, by: &Self) -> Self {
        self / by
    }
    fn gcd(&self, other: &Self) -> Self {
        // cross() never yields i128::MIN, so abs() cannot overflow
        let (mut x, mut y) = (self.abs(), other.abs());
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn bits(&self) -> u64 {
        (128 - self.unsigned_abs().leading_zeros()) as u64
    }
}

impl Ring for BigInt {
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn cross(a: &Self, b: &Self, c: &Self, e: &Self) -> Option<Self> {
        Some(a * b - c * e)
    }
    fn div_exact(&self, by: &Self) -> Self {
        self / by
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn bits(&self) -> u64 {
        self.magnitude().bits()
    }
}

fn convert<T>(rows: &[Vec<BigInt>]) -> Option<Vec<Vec<T>>>
where
    T: Ring + TryFrom<BigInt>,
{
    rows.iter()
        .map(|r| r.iter().map(|x| T::try_from(x.clone()).ok()).collect())
        .collect()
}

/// Bareiss elimination with row pivoting; returns the rank, or `None` on
/// overflow. Every intermediate entry is a minor of the input.
fn bareiss<T: Ring>(mut m: Vec<Vec<T>>, ncols: usize) -> Option<usize> {
    let nrows = m.len();
    let mut r = 0;
    let mut prev = T::one();
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&p| !m[p][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = &pivot_row[c];
        for row in rest.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..ncols {
                row[j] = T::cross(pivot, &row[j], &factor, &pivot_row[j])?.div_exact(&prev);
            }
            row[c] = T::zero();
        }
        prev = pivot.clone();
        r += 1;
    }
    Some(r)
}

/// Exact rank over the rationals of an integer matrix.
pub fn rank(rows: &[Vec<i64>], ncols: usize) -> usize {
    let small: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some(r) = bareiss(small, ncols) {
        return r;
    }
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss(big, ncols).expect("BigInt arithmetic cannot overflow")
}

/// Integer echelon data: reduced rows (each primitive, pivot positive, zero
/// in every other pivot column) and pivot columns.
pub(crate) struct IntRref {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

fn make_primitive<T: Ring>(row: &mut [T]) {
    let mut g = T::zero();
    for x in row.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_unit() {
                break;
            }
        }
    }
    let flip = row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    if g.is_zero() {
        return;
    }
    if !g.is_unit() {
        for x in row.iter_mut() {
            *x = x.div_exact(&g);
        }
    }
    if flip {
        for x in row.iter_mut() {
            *x = x.neg();
        }
    }
}

fn rref_generic<T: Ring>(mut m: Vec<Vec<T>>, ncols: usize) -> Option<(Vec<Vec<T>>, Vec<usize>)> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        // smallest-magnitude pivot keeps the cross products small
        let Some(p) = (r..nrows)
            .filter(|&p| !m[p][c].is_zero())
            .min_by_key(|&p| m[p][c].bits())
        else {
            continue;
        };
        m.swap(r, p);
        let pivot_row = m[r].clone();
        let pivot = &pivot_row[c];
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = pivot.gcd(&row[c]);
            let a = pivot.div_exact(&g);
            let b = row[c].div_exact(&g);
            for j in 0..ncols {
                if pivot_row[j].is_zero() && row[j].is_zero() {
                    continue;
                }
                row[j] = T::cross(&a, &row[j], &b, &pivot_row[j])?;
            }
            make_primitive(row);
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    for row in m.iter_mut() {
        make_primitive(row);
    }
    Some((m, pivots))
}

pub(crate) fn rref(rows: &[Vec<BigInt>], ncols: usize) -> IntRref {
    if let Some(small) = convert::<i128>(rows) {
        if let Some((m, pivots)) = rref_generic(small, ncols) {
            return IntRref { rows: m.iter().map(|r| r.iter().map(Ring::to_bigint).collect()).collect(), pivots };
        }
    }
    let (m, pivots) = rref_generic(rows.to_vec(), ncols).expect("BigInt arithmetic cannot overflow");
    IntRref { rows: m, pivots }
}
