use serde::Serialize;

use switchlab::linalg::rational::format_vector;
use switchlab::linalg::{self, Side};
use switchlab::rng;
use switchlab::sampler::{sample_uniform, SamplerConfig};
use switchlab::switching;
use switchlab::BiregularMatrix;

/// Largest `n` the page accepts; exact kernels get slow beyond it.
pub const MAX_N: usize = 40;
pub const MAX_TRIALS: u32 = 5000;
const STUB_BUDGET: u64 = 200_000;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error(transparent)]
    Core(#[from] switchlab::Error),
    #[error("{0}")]
    Input(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type Result<T> = std::result::Result<T, DemoError>;

#[derive(Serialize, Debug)]
pub struct MatrixView {
    pub n: usize,
    pub d: usize,
    pub text: String,
    pub rows: Vec<Vec<u8>>,
    pub rank: usize,
    pub corank: usize,
    pub switchings: u64,
    pub right_kernel: Vec<String>,
    pub left_kernel: Vec<String>,
}

impl MatrixView {
    fn of(a: &BiregularMatrix) -> Self {
        let rank = linalg::rank_rational(a);
        let basis = |side| linalg::kernel(a, side).vectors.iter().map(|v| format_vector(v)).collect();
        MatrixView {
            n: a.n(),
            d: a.d(),
            text: a.serialize(),
            rows: a.to_dense(),
            rank,
            corank: a.n() - rank,
            switchings: switching::count(a),
            right_kernel: basis(Side::Right),
            left_kernel: basis(Side::Left),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct SwitchView {
    /// `"i j k l"`
    pub switch: String,
    pub rank_before: usize,
    pub delta: i64,
    pub after: MatrixView,
}

#[derive(Serialize, Debug)]
pub struct Histogram {
    pub n: usize,
    pub d: usize,
    pub trials: u32,
    /// `counts[c]` = samples with corank `c`
    pub counts: Vec<u32>,
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if n == 0 || n > MAX_N || d == 0 || d > n {
        return Err(DemoError::Input(format!("need 1 <= d <= n <= {MAX_N}, got n={n}, d={d}")));
    }
    Ok(())
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string(v)?)
}

pub fn sample(n: usize, d: usize, seed: u64) -> Result<MatrixView> {
    check_size(n, d)?;
    let a = sample_uniform(n, d, &SamplerConfig::stub(STUB_BUDGET, seed), &mut rng::seeded(seed))?;
    Ok(MatrixView::of(&a))
}

pub fn switch_once(matrix: &str, seed: u64) -> Result<SwitchView> {
    let a = BiregularMatrix::parse(matrix)?;
    check_size(a.n(), a.d())?;
    let sw = switching::random_switch(&a, &mut rng::seeded(seed))?;
    let b = switching::apply(&a, sw)?;
    let rank_before = linalg::rank_rational(&a);
    let after = MatrixView::of(&b);
    Ok(SwitchView { switch: sw.to_string(), rank_before, delta: after.rank as i64 - rank_before as i64, after })
}

pub fn corank_histogram(n: usize, d: usize, trials: u32, seed: u64) -> Result<Histogram> {
    check_size(n, d)?;
    if trials == 0 || trials > MAX_TRIALS {
        return Err(DemoError::Input(format!("trials must be in 1..={MAX_TRIALS}")));
    }
    let config = SamplerConfig::stub(STUB_BUDGET, seed);
    let mut counts = vec![0u32; n + 1];
    for t in 0..trials {
        let a = sample_uniform(n, d, &config, &mut rng::derive(seed, rng::grid_key(n, d), t as u64))?;
        counts[n - linalg::rank_rational(&a)] += 1;
    }
    while counts.len() > 1 && counts.last() == Some(&0) {
        counts.pop();
    }
    Ok(Histogram { n, d, trials, counts })
}
