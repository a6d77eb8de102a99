//! Monte-Carlo estimation of `r_n` and of tie and maximum-score statistics.
//!
//! Every replication draws its games from its own counter-based stream (see
//! [`crate::rng`]), and per-replication results are combined with integer
//! sums or in replication order, so output depends only on the configuration,
//! never on how replications are scheduled across workers.

use rayon::prelude::*;

use crate::bounds::{concentration_center, threshold, EpsilonSign, ThresholdParams, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::rng::StreamKey;
use crate::tournament::{game_count, TournamentMatrix};

/// Replications handled by one unit of parallel work.
const BLOCK: u64 = 2048;

/// Quantile levels reported for the centered maximum score.
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    pub epsilon: f64,
}

impl SimConfig {
    pub fn new(n: usize, reps: u64, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("player count must be at least 1".into()));
        }
        if reps == 0 {
            return Err(Error::Argument("replication count must be at least 1".into()));
        }
        Ok(SimConfig {
            n,
            reps,
            seed,
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// One tournament drawn from stream `key`.
pub fn sample_tournament(n: usize, key: StreamKey) -> TournamentMatrix {
    let stream = key.stream();
    TournamentMatrix::from_pair_bits(n, |g| stream.bit(g as u64))
}

/// Reusable buffers for computing the player-order scores of a sampled
/// tournament without materializing its matrix.
pub struct ScoreSampler {
    n: usize,
    words: Vec<u64>,
    scores: Vec<u32>,
}

impl ScoreSampler {
    pub fn new(n: usize) -> Self {
        let words = game_count(n).div_ceil(64) + 1;
        ScoreSampler {
            n,
            words: vec![0; words],
            scores: vec![0; n],
        }
    }

    /// Scores of the tournament drawn from `key`, in player order.
    pub fn scores(&mut self, key: StreamKey) -> &[u32] {
        let n = self.n;
        let used = game_count(n).div_ceil(64);
        key.stream().fill(&mut self.words[..used]);
        let words = &self.words;
        let scores = &mut self.scores;
        scores.iter_mut().for_each(|s| *s = 0);

        let mut g = 0usize;
        for i in 0..n {
            let mut col = i + 1;
            let mut wins = 0u32;
            while col < n {
                let take = (n - col).min(64);
                let chunk = extract(words, g, take);
                wins += chunk.count_ones();
                let losses = !chunk;
                if take == 64 {
                    let cols: &mut [u32; 64] = (&mut scores[col..col + 64]).try_into().unwrap();
                    add_bits64(cols, losses);
                } else {
                    for (k, s) in scores[col..col + take].iter_mut().enumerate() {
                        *s += (losses >> k & 1) as u32;
                    }
                }
                g += take;
                col += take;
            }
            scores[i] += wins;
        }
        &self.scores
    }
}

/// Bits `g .. g + take` of the stream, least significant first.
#[inline]
fn extract(words: &[u64], g: usize, take: usize) -> u64 {
    let w = g / 64;
    let off = g % 64;
    let mut v = words[w] >> off;
    if off != 0 && off + take > 64 {
        v |= words[w + 1] << (64 - off);
    }
    if take < 64 {
        v &= (1u64 << take) - 1;
    }
    v
}

#[inline]
fn add_bits64(cols: &mut [u32; 64], bits: u64) {
    for (k, c) in cols.iter_mut().enumerate() {
        *c += (bits >> k & 1) as u32;
    }
}

/// Estimate of `r_n` from `reps` independent tournaments.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateRecord {
    pub config: SimConfig,
    pub successes: u64,
    pub r_hat: f64,
    /// `sqrt(r_hat (1 - r_hat) / reps)`
    pub se: f64,
}

pub fn estimate_r(config: &SimConfig) -> EstimateRecord {
    estimate_r_with(config, None)
}

pub fn estimate_r_with(config: &SimConfig, workers: Option<usize>) -> EstimateRecord {
    let n = config.n;
    let seed = config.seed;
    let successes: u64 = run_blocks(config.reps, workers, |range| {
        let mut sampler = ScoreSampler::new(n);
        range
            .filter(|&r| unique_top(sampler.scores(StreamKey::new(seed, r))))
            .count() as u64
    })
    .into_iter()
    .sum();
    let m = config.reps as f64;
    let r_hat = successes as f64 / m;
    EstimateRecord {
        config: *config,
        successes,
        r_hat,
        se: (r_hat * (1.0 - r_hat) / m).sqrt(),
    }
}

fn unique_top(scores: &[u32]) -> bool {
    let mut top = 0;
    let mut count = 0;
    for &s in scores {
        if s > top {
            top = s;
            count = 1;
        } else if s == top {
            count += 1;
        }
    }
    count == 1
}

/// Runs `work` over consecutive replication blocks and returns the block
/// results in block order.
fn run_blocks<T: Send>(
    reps: u64,
    workers: Option<usize>,
    work: impl Fn(std::ops::Range<u64>) -> T + Sync,
) -> Vec<T> {
    let blocks = reps.div_ceil(BLOCK);
    let block = |b: u64| work(b * BLOCK..((b + 1) * BLOCK).min(reps));
    match workers {
        Some(1) => (0..blocks).map(block).collect(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .expect("thread pool")
            .install(|| (0..blocks).into_par_iter().map(block).collect()),
        None => (0..blocks).into_par_iter().map(block).collect(),
    }
}

/// What one replication says about the maximum score and ties near it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReplicationSummary {
    pub s_max: u32,
    /// Number of players attaining `s_max`.
    pub max_count: u32,
    /// Some score `h` in the tie window is shared by two or more players.
    pub tie_in_window: bool,
}

/// Which scores count as ties for the `W_n > 0` indicator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieWindow {
    /// `t <= h <= n - 1`
    #[default]
    AtOrAbove,
    /// `t < h <= n - 1`
    Above,
}

impl TieWindow {
    fn lowest(self, t: i64) -> i64 {
        match self {
            TieWindow::AtOrAbove => t,
            TieWindow::Above => t + 1,
        }
    }
}

pub fn summarize(scores: &[u32], t: i64, window: TieWindow, seen: &mut Vec<u32>) -> ReplicationSummary {
    let n = scores.len();
    let lo = window.lowest(t).max(0) as usize;
    let span = n.saturating_sub(lo);
    seen.clear();
    seen.resize(span, 0);
    let mut s_max = 0;
    let mut max_count = 0;
    for &s in scores {
        if s > s_max {
            s_max = s;
            max_count = 1;
        } else if s == s_max {
            max_count += 1;
        }
        let s = s as usize;
        if s >= lo {
            seen[s - lo] += 1;
        }
    }
    ReplicationSummary {
        s_max,
        max_count,
        tie_in_window: seen.iter().any(|&c| c >= 2),
    }
}

/// Summary of replication `replication` under `seed`.
pub fn summarize_replication(
    n: usize,
    key: StreamKey,
    t: i64,
    window: TieWindow,
) -> ReplicationSummary {
    let mut sampler = ScoreSampler::new(n);
    summarize(sampler.scores(key), t, window, &mut Vec::new())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TieStats {
    pub config: SimConfig,
    pub window: TieWindow,
    pub t: i64,
    /// Fraction of replications with a tie in the window (`W_n > 0`).
    pub frac_w_positive: f64,
    /// Fraction with `s* > t`.
    pub frac_smax_above_t: f64,
    pub frac_unique_max: f64,
    /// Replications with `s* >= t`, no tie in the window and yet a shared
    /// maximum. Always zero; kept as a consistency check.
    pub inconsistent: u64,
    pub center: f64,
    /// `(level, quantile of s* - center)` for [`QUANTILE_LEVELS`].
    pub centered_smax_quantiles: Vec<(f64, f64)>,
    /// `(s*, replications)` in increasing order of `s*`.
    pub smax_histogram: Vec<(u32, u64)>,
}

impl TieStats {
    pub fn median_centered(&self) -> f64 {
        self.centered_smax_quantiles
            .iter()
            .find(|(q, _)| *q == 0.5)
            .map(|(_, v)| *v)
            .expect("median is reported")
    }

    /// Empirical `P(s* <= k)`.
    pub fn smax_cdf(&self, k: i64) -> f64 {
        let hits: u64 = self
            .smax_histogram
            .iter()
            .take_while(|(v, _)| i64::from(*v) <= k)
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.config.reps as f64
    }
}

pub fn tie_stats(config: &SimConfig, window: TieWindow, workers: Option<usize>) -> Result<TieStats> {
    let n = config.n;
    if n < 4 {
        return Err(Error::Argument(format!("tie statistics need n >= 4, got {n}")));
    }
    let th = threshold(&ThresholdParams::new(n as u64, config.epsilon, EpsilonSign::Plus)?)?;
    let t = th.ceil();
    let center = concentration_center(n as u64)?;
    let seed = config.seed;

    struct Block {
        maxima: Vec<u32>,
        ties: u64,
        above: u64,
        unique: u64,
        inconsistent: u64,
    }
    let blocks = run_blocks(config.reps, workers, |range| {
        let mut sampler = ScoreSampler::new(n);
        let mut seen = Vec::new();
        let mut b = Block {
            maxima: Vec::with_capacity((range.end - range.start) as usize),
            ties: 0,
            above: 0,
            unique: 0,
            inconsistent: 0,
        };
        for r in range {
            let s = summarize(sampler.scores(StreamKey::new(seed, r)), t, window, &mut seen);
            b.maxima.push(s.s_max);
            b.ties += u64::from(s.tie_in_window);
            b.above += u64::from(i64::from(s.s_max) > t);
            b.unique += u64::from(s.max_count == 1);
            if i64::from(s.s_max) >= t && !s.tie_in_window && s.max_count != 1 {
                b.inconsistent += 1;
            }
        }
        b
    });

    let m = config.reps as f64;
    let mut maxima = Vec::with_capacity(config.reps as usize);
    let (mut ties, mut above, mut unique, mut inconsistent) = (0, 0, 0, 0);
    for b in blocks {
        maxima.extend(b.maxima);
        ties += b.ties;
        above += b.above;
        unique += b.unique;
        inconsistent += b.inconsistent;
    }
    maxima.sort_unstable();
    let centered_smax_quantiles = QUANTILE_LEVELS
        .iter()
        .map(|&q| (q, f64::from(nearest_rank(&maxima, q)) - center))
        .collect();
    let mut smax_histogram: Vec<(u32, u64)> = Vec::new();
    for &v in &maxima {
        match smax_histogram.last_mut() {
            Some((u, c)) if *u == v => *c += 1,
            _ => smax_histogram.push((v, 1)),
        }
    }
    Ok(TieStats {
        config: *config,
        window,
        t,
        frac_w_positive: ties as f64 / m,
        frac_smax_above_t: above as f64 / m,
        frac_unique_max: unique as f64 / m,
        inconsistent,
        center,
        centered_smax_quantiles,
        smax_histogram,
    })
}

/// Nearest-rank quantile of sorted data.
fn nearest_rank(sorted: &[u32], q: f64) -> u32 {
    let idx = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[idx]
}
