//! Simple switchings.
//!
//! A switching in `(i, j, k, l)` can be performed on `A` when
//! `a[i][k] = a[j][l] = 1` and `a[i][l] = a[j][k] = 0`; performing it moves
//! the ones to `(i, l)` and `(j, k)`. Row and column sums are preserved.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BiregularMatrix;

/// Retry budget used by [`random_switch`].
pub const DEFAULT_SWITCH_ATTEMPTS: u64 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Switch {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl Switch {
    pub const fn new(i: usize, j: usize, k: usize, l: usize) -> Self {
        Self { i, j, k, l }
    }

    /// `(j, i, l, k)`: the same transformation written from the other row.
    pub const fn partner(self) -> Self {
        Self::new(self.j, self.i, self.l, self.k)
    }

    /// `(i, j, l, k)`: undoes `self` on the switched matrix.
    pub const fn reverse(self) -> Self {
        Self::new(self.i, self.j, self.l, self.k)
    }

    /// The lexicographically smaller of `self` and its partner.
    pub fn canonical(self) -> Self {
        self.min(self.partner())
    }
}

impl fmt::Display for Switch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.i, self.j, self.k, self.l)
    }
}

impl FromStr for Switch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(' ').collect();
        let bad = |pos| Error::Parse { line: 1, pos, msg: "expected \"i j k l\"".into() };
        if parts.len() != 4 {
            return Err(bad(1));
        }
        let mut v = [0usize; 4];
        let mut pos = 1;
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| bad(pos))?;
            pos += p.len() + 1;
        }
        Ok(Self::new(v[0], v[1], v[2], v[3]))
    }
}

/// `|F_A|` with the two bounds `n(n-d)d^2 - nd(d-1)^2` and `n(n-d)d^2`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SwitchCount {
    pub total: u64,
    pub lower_bound: i128,
    pub upper_bound: i128,
}

impl SwitchCount {
    pub fn bounds(n: usize, d: usize) -> (i128, i128) {
        let (n, d) = (n as i128, d as i128);
        let upper = n * (n - d) * d * d;
        (upper - n * d * (d - 1) * (d - 1), upper)
    }
}

fn check_switch(a: &BiregularMatrix, sw: Switch) -> Result<()> {
    for idx in [sw.i, sw.j, sw.k, sw.l] {
        a.check_index(idx)?;
    }
    Ok(())
}

pub fn can_perform(a: &BiregularMatrix, sw: Switch) -> Result<bool> {
    check_switch(a, sw)?;
    Ok(feasible(a, sw))
}

#[inline]
fn feasible(a: &BiregularMatrix, sw: Switch) -> bool {
    a.has(sw.i, sw.k) && a.has(sw.j, sw.l) && !a.has(sw.i, sw.l) && !a.has(sw.j, sw.k)
}

/// Performs the switching, returning the new matrix.
pub fn apply(a: &BiregularMatrix, sw: Switch) -> Result<BiregularMatrix> {
    if !can_perform(a, sw)? {
        return Err(Error::InfeasibleSwitch(sw));
    }
    let d = a.d();
    let mut rows = a.flat_rows().to_vec();
    move_one(&mut rows[sw.i * d..(sw.i + 1) * d], sw.k, sw.l);
    move_one(&mut rows[sw.j * d..(sw.j + 1) * d], sw.l, sw.k);
    // rebuilding the column mirror also re-validates the degrees
    BiregularMatrix::from_sorted_rows(a.n(), d, rows)
}

/// Replaces `from` by `to` in a sorted chunk, keeping it sorted.
fn move_one(chunk: &mut [u32], from: usize, to: usize) {
    let (from, to) = (from as u32, to as u32);
    let mut p = chunk.binary_search(&from).expect("index present in support");
    chunk[p] = to;
    while p + 1 < chunk.len() && chunk[p] > chunk[p + 1] {
        chunk.swap(p, p + 1);
        p += 1;
    }
    while p > 0 && chunk[p - 1] > chunk[p] {
        chunk.swap(p - 1, p);
        p -= 1;
    }
}

/// Visits every performable ordered tuple: `(i, k)` over the ones in
/// row-major order, then `(j, l)` likewise.
pub fn for_each_switch(a: &BiregularMatrix, mut f: impl FnMut(Switch)) {
    let n = a.n();
    for i in 0..n {
        for &k in a.row(i) {
            let k = k as usize;
            for j in 0..n {
                if j == i || a.has(j, k) {
                    continue;
                }
                for &l in a.row(j) {
                    let l = l as usize;
                    if !a.has(i, l) {
                        f(Switch::new(i, j, k, l));
                    }
                }
            }
        }
    }
}

/// All of `F_A`. Both `(i,j,k,l)` and `(j,i,l,k)` appear.
pub fn enumerate(a: &BiregularMatrix) -> Vec<Switch> {
    let mut out = Vec::new();
    for_each_switch(a, |sw| out.push(sw));
    out
}

pub fn count(a: &BiregularMatrix) -> u64 {
    let mut c = 0;
    for_each_switch(a, |_| c += 1);
    c
}

pub fn count_with_bounds(a: &BiregularMatrix) -> Result<SwitchCount> {
    let total = count(a);
    let (lower_bound, upper_bound) = SwitchCount::bounds(a.n(), a.d());
    if (total as i128) < lower_bound || (total as i128) > upper_bound {
        return Err(Error::BoundViolation { total, lower: lower_bound, upper: upper_bound });
    }
    Ok(SwitchCount { total, lower_bound, upper_bound })
}

/// Keeps one representative of each `{(i,j,k,l), (j,i,l,k)}` pair: the
/// lexicographically smaller one, or the only one present. Input order is
/// preserved.
pub fn dedup(switches: &[Switch]) -> Vec<Switch> {
    let present: HashSet<Switch> = switches.iter().copied().collect();
    let mut seen = HashSet::new();
    switches
        .iter()
        .copied()
        .filter(|&sw| {
            let p = sw.partner();
            let keep = sw <= p || !present.contains(&p);
            keep && seen.insert(sw)
        })
        .collect()
}

/// Uniform element of `F_A`: two independent uniform ones `(i,k)`, `(j,l)`,
/// retried until performable.
pub fn random_switch<R: Rng + ?Sized>(a: &BiregularMatrix, rng: &mut R) -> Result<Switch> {
    random_switch_with_budget(a, rng, DEFAULT_SWITCH_ATTEMPTS)
}

pub fn random_switch_with_budget<R: Rng + ?Sized>(
    a: &BiregularMatrix,
    rng: &mut R,
    attempts: u64,
) -> Result<Switch> {
    let ones = a.n() * a.d();
    for _ in 0..attempts {
        let (i, k) = a.one_at(crate::rng::index(rng, ones));
        let (j, l) = a.one_at(crate::rng::index(rng, ones));
        let sw = Switch::new(i, j, k, l);
        if feasible(a, sw) {
            return Ok(sw);
        }
    }
    Err(Error::NoSwitch { attempts })
}

/// In-place switching with an optional undo log.
#[derive(Clone, Debug)]
pub struct SwitchSession {
    n: usize,
    d: usize,
    rows: Vec<u32>,
    log: Option<Vec<Switch>>,
}

impl SwitchSession {
    pub fn new(a: &BiregularMatrix) -> Self {
        Self { n: a.n(), d: a.d(), rows: a.flat_rows().to_vec(), log: Some(Vec::new()) }
    }

    /// A session that keeps no history; `undo` always returns `None`.
    pub fn without_log(a: &BiregularMatrix) -> Self {
        Self { log: None, ..Self::new(a) }
    }

    #[inline]
    fn has(&self, s: usize, t: usize) -> bool {
        self.rows[s * self.d..(s + 1) * self.d].binary_search(&(t as u32)).is_ok()
    }

    pub fn can_perform(&self, sw: Switch) -> bool {
        [sw.i, sw.j, sw.k, sw.l].iter().all(|&x| x < self.n)
            && self.has(sw.i, sw.k)
            && self.has(sw.j, sw.l)
            && !self.has(sw.i, sw.l)
            && !self.has(sw.j, sw.k)
    }

    fn perform(&mut self, sw: Switch) {
        let d = self.d;
        move_one(&mut self.rows[sw.i * d..(sw.i + 1) * d], sw.k, sw.l);
        move_one(&mut self.rows[sw.j * d..(sw.j + 1) * d], sw.l, sw.k);
    }

    pub fn apply(&mut self, sw: Switch) -> Result<()> {
        if !self.can_perform(sw) {
            return Err(Error::InfeasibleSwitch(sw));
        }
        self.perform(sw);
        if let Some(log) = &mut self.log {
            log.push(sw);
        }
        Ok(())
    }

    /// Reverts the most recent logged switching.
    pub fn undo(&mut self) -> Option<Switch> {
        let sw = self.log.as_mut()?.pop()?;
        self.perform(sw.reverse());
        Some(sw)
    }

    pub fn history(&self) -> &[Switch] {
        self.log.as_deref().unwrap_or(&[])
    }

    /// One lazy step of the switching walk: draws two uniform ones and
    /// performs the switching when possible. Returns the switching performed.
    pub fn lazy_step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<Switch> {
        let ones = self.n * self.d;
        let q1 = crate::rng::index(rng, ones);
        let q2 = crate::rng::index(rng, ones);
        let sw = Switch::new(q1 / self.d, q2 / self.d, self.rows[q1] as usize, self.rows[q2] as usize);
        if self.has(sw.i, sw.l) || self.has(sw.j, sw.k) {
            return None;
        }
        self.perform(sw);
        if let Some(log) = &mut self.log {
            log.push(sw);
        }
        Some(sw)
    }

    pub fn snapshot(&self) -> BiregularMatrix {
        BiregularMatrix::from_sorted_rows(self.n, self.d, self.rows.clone())
            .expect("switchings preserve degrees")
    }
}
