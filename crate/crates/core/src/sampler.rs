//! Samplers for `A_{n,d}`.
//!
//! * stub matching with rejection: exactly uniform conditioned on acceptance,
//!   since every simple matrix arises from exactly `(d!)^(2n)` bijections;
//! * a lazy switching walk started from the circulant matrix: approximate;
//! * exhaustive backtracking enumeration for tiny `(n, d)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::BiregularMatrix;
use crate::rng;
use crate::switching::SwitchSession;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    StubRejection,
    Mcmc,
    Exhaustive,
}

impl SamplerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerKind::StubRejection => "stub_rejection",
            SamplerKind::Mcmc => "mcmc",
            SamplerKind::Exhaustive => "exhaustive",
        }
    }

    /// Only stub rejection (and exhaustive enumeration) is exactly uniform.
    pub fn is_exact(self) -> bool {
        !matches!(self, SamplerKind::Mcmc)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    pub max_rejections: u64,
    /// `None` means `10 * n * d^2`.
    pub burn_in_steps: Option<u64>,
    pub steps_between_samples: u64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self::stub(10_000, 0)
    }
}

impl SamplerConfig {
    pub fn stub(max_rejections: u64, seed: u64) -> Self {
        Self {
            kind: SamplerKind::StubRejection,
            max_rejections,
            burn_in_steps: None,
            steps_between_samples: 1,
            seed,
        }
    }

    pub fn mcmc(burn_in_steps: Option<u64>, seed: u64) -> Self {
        Self {
            kind: SamplerKind::Mcmc,
            max_rejections: 1,
            burn_in_steps,
            steps_between_samples: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == SamplerKind::StubRejection && self.max_rejections == 0 {
            return Err(Error::InvalidParams("max_rejections must be at least 1".into()));
        }
        if self.kind == SamplerKind::Mcmc && self.steps_between_samples == 0 {
            return Err(Error::InvalidParams("steps_between_samples must be at least 1".into()));
        }
        Ok(())
    }

    pub fn burn_in(&self, n: usize, d: usize) -> u64 {
        self.burn_in_steps.unwrap_or(default_burn_in(n, d))
    }
}

pub fn default_burn_in(n: usize, d: usize) -> u64 {
    10 * (n * d * d) as u64
}

/// One round of stub matching. `None` means the bijection produced a
/// repeated entry and was rejected.
pub fn sample_stub<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Option<BiregularMatrix>> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::InvalidParams(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    let stubs = n * d;
    let mut in_stubs: Vec<u32> = (0..stubs as u32).collect();
    let mut rows = vec![0u32; stubs];
    // out-stub q belongs to row q / d; it is matched by a Fisher-Yates step,
    // so the bijection is uniform and a row can be abandoned at its first collision
    for q in 0..stubs {
        let pick = rng::index_in(rng, q, stubs);
        in_stubs.swap(q, pick);
        let col = in_stubs[q] / d as u32;
        let row_start = q - q % d;
        if rows[row_start..q].contains(&col) {
            return Ok(None);
        }
        rows[q] = col;
    }
    for chunk in rows.chunks_mut(d) {
        chunk.sort_unstable();
    }
    BiregularMatrix::from_sorted_rows(n, d, rows).map(Some)
}

/// Repeats [`sample_stub`] up to `config.max_rejections` times.
pub fn sample_uniform<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<BiregularMatrix> {
    sample_uniform_counted(n, d, config, rng).map(|(a, _)| a)
}

/// Like [`sample_uniform`], also returning the number of stub rounds used.
pub fn sample_uniform_counted<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<(BiregularMatrix, u64)> {
    config.validate()?;
    for attempt in 1..=config.max_rejections {
        if let Some(a) = sample_stub(n, d, rng)? {
            return Ok((a, attempt));
        }
    }
    Err(Error::RejectionBudgetExceeded { attempts: config.max_rejections })
}

/// Runs the lazy switching walk from `circulant(n, d)` for the configured
/// burn-in and returns the final state.
pub fn sample_mcmc<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<BiregularMatrix> {
    config.validate()?;
    let start = BiregularMatrix::circulant(n, d)?;
    if d == n {
        // no switching can be performed on the all-ones matrix
        return Ok(start);
    }
    let mut session = SwitchSession::without_log(&start);
    for _ in 0..config.burn_in(n, d) {
        session.lazy_step(rng);
    }
    Ok(session.snapshot())
}

/// A single switching chain emitting a state every `steps_between_samples`
/// steps after burn-in.
pub struct McmcChain<R> {
    session: SwitchSession,
    rng: R,
    burned_in: bool,
    burn_in: u64,
    thin: u64,
    frozen: bool,
}

impl<R: Rng> McmcChain<R> {
    pub fn new(n: usize, d: usize, config: &SamplerConfig, rng: R) -> Result<Self> {
        config.validate()?;
        let start = BiregularMatrix::circulant(n, d)?;
        Ok(Self {
            session: SwitchSession::without_log(&start),
            rng,
            burned_in: false,
            burn_in: config.burn_in(n, d),
            thin: config.steps_between_samples.max(1),
            frozen: d == n,
        })
    }

    fn run(&mut self, steps: u64) {
        if self.frozen {
            return;
        }
        for _ in 0..steps {
            self.session.lazy_step(&mut self.rng);
        }
    }
}

impl<R: Rng> Iterator for McmcChain<R> {
    type Item = BiregularMatrix;

    fn next(&mut self) -> Option<BiregularMatrix> {
        if !self.burned_in {
            self.run(self.burn_in);
            self.burned_in = true;
        } else {
            self.run(self.thin);
        }
        Some(self.session.snapshot())
    }
}

/// Dispatches on `config.kind`. `Exhaustive` is not a random sampler.
pub fn sample<R: Rng + ?Sized>(n: usize, d: usize, config: &SamplerConfig, rng: &mut R) -> Result<BiregularMatrix> {
    match config.kind {
        SamplerKind::StubRejection => sample_uniform(n, d, config, rng),
        SamplerKind::Mcmc => sample_mcmc(n, d, config, rng),
        SamplerKind::Exhaustive => Err(Error::InvalidParams(
            "the exhaustive sampler enumerates; use enumerate_all".into(),
        )),
    }
}

/// Size limits for exhaustive enumeration: allowed when `n <= max_n` or
/// `n * d <= max_nd`.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SizeGuard {
    pub max_n: usize,
    pub max_nd: usize,
}

impl Default for SizeGuard {
    fn default() -> Self {
        Self { max_n: 7, max_nd: 16 }
    }
}

impl SizeGuard {
    pub fn allows(&self, n: usize, d: usize) -> bool {
        n <= self.max_n || n * d <= self.max_nd
    }

    pub fn check(&self, n: usize, d: usize) -> Result<()> {
        if self.allows(n, d) {
            Ok(())
        } else {
            Err(Error::SizeGuard { n, d })
        }
    }
}

pub fn enumerate_all(n: usize, d: usize) -> Result<AllMatrices> {
    enumerate_all_guarded(n, d, SizeGuard::default())
}

pub fn enumerate_all_guarded(n: usize, d: usize, guard: SizeGuard) -> Result<AllMatrices> {
    guard.check(n, d)?;
    BiregularMatrix::circulant(n, d)?;
    Ok(AllMatrices::new(n, d))
}

/// Every member of `A_{n,d}` exactly once, rows chosen by backtracking over
/// lexicographically ordered `d`-subsets.
pub struct AllMatrices {
    n: usize,
    d: usize,
    subsets: Vec<Vec<u32>>,
    stack: Vec<usize>,
    next_try: Vec<usize>,
    used: Vec<usize>,
    done: bool,
}

impl AllMatrices {
    fn new(n: usize, d: usize) -> Self {
        Self {
            n,
            d,
            subsets: d_subsets(n, d),
            stack: Vec::with_capacity(n),
            next_try: vec![0; n],
            used: vec![0; n],
            done: false,
        }
    }

    fn fits(&self, idx: usize, row: usize) -> bool {
        let subset = &self.subsets[idx];
        if subset.iter().any(|&t| self.used[t as usize] >= self.d) {
            return false;
        }
        // after this row, every column's remaining demand must fit in the rows left
        let rows_left = self.n - row - 1;
        (0..self.n).all(|c| {
            let after = self.used[c] + usize::from(subset.binary_search(&(c as u32)).is_ok());
            self.d - after <= rows_left
        })
    }

    fn assign(&mut self, idx: usize, sign: isize) {
        for &t in &self.subsets[idx] {
            self.used[t as usize] = (self.used[t as usize] as isize + sign) as usize;
        }
    }
}

impl Iterator for AllMatrices {
    type Item = BiregularMatrix;

    fn next(&mut self) -> Option<BiregularMatrix> {
        if self.done {
            return None;
        }
        loop {
            let row = self.stack.len();
            if row == self.n {
                let flat: Vec<u32> = self.stack.iter().flat_map(|&i| self.subsets[i].iter().copied()).collect();
                let idx = self.stack.pop().expect("n >= 1");
                self.assign(idx, -1);
                return Some(BiregularMatrix::from_sorted_rows(self.n, self.d, flat).expect("column sums enforced"));
            }
            let mut advanced = false;
            while self.next_try[row] < self.subsets.len() {
                let idx = self.next_try[row];
                self.next_try[row] += 1;
                if self.fits(idx, row) {
                    self.assign(idx, 1);
                    self.stack.push(idx);
                    if row + 1 < self.n {
                        self.next_try[row + 1] = 0;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                match self.stack.pop() {
                    Some(idx) => self.assign(idx, -1),
                    None => {
                        self.done = true;
                        return None;
                    }
                }
            }
        }
    }
}

fn d_subsets(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn rec(start: usize, n: usize, d: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == d {
            out.push(cur.clone());
            return;
        }
        for t in start..n {
            if n - t < d - cur.len() {
                break;
            }
            cur.push(t as u32);
            rec(t + 1, n, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, d, &mut Vec::with_capacity(d), &mut out);
    out
}
