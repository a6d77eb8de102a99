//! Exact score-frequency tables by dynamic programming over score multisets.
//!
//! Players are added one at a time. A state is the sorted score multiset of a
//! complete tournament on the players added so far, weighted by the number of
//! labeled tournaments realizing it. When a new player joins, it loses to
//! some subset of the existing players; subsets only matter through how many
//! players of each score value are in them, so the fan-out is grouped by
//! score class with weight `prod_s C(m_s, k_s)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tournament::{game_count, tournament_count, BigCount, FrequencyTable, ScoreMultiset};

pub const DEFAULT_LIMIT: usize = 13;

/// Largest player count whose tournament total `2^(n(n-1)/2)` fits in a `u128`.
const U128_MAX_PLAYERS: usize = 16;

#[derive(Clone, Debug)]
pub struct ExpandOptions {
    /// Largest `n` accepted by [`expand_with`].
    pub limit: usize,
    /// Worker threads; `Some(1)` runs the sequential path, `None` uses the
    /// global rayon pool.
    pub workers: Option<usize>,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions {
            limit: DEFAULT_LIMIT,
            workers: None,
        }
    }
}

/// Exact frequency table for `n` players with the default limit.
pub fn expand(n: usize) -> Result<FrequencyTable> {
    expand_with(n, &ExpandOptions::default())
}

pub fn expand_with(n: usize, opts: &ExpandOptions) -> Result<FrequencyTable> {
    if n == 0 {
        return Err(Error::Argument("player count must be at least 1".into()));
    }
    if n > opts.limit {
        return Err(Error::LimitExceeded {
            n,
            limit: opts.limit,
            estimated_states: score_sequence_count(n).to_string(),
        });
    }
    if n > u8::MAX as usize {
        return Err(Error::Argument(format!("n = {n} is too large for exact enumeration")));
    }
    let seed: Layer<u128> = vec![(vec![0u8], 1u128)];
    if n <= U128_MAX_PLAYERS {
        let layer = grow(seed, 1, n, opts.workers);
        Ok(into_table(n, layer))
    } else {
        let mid = grow(seed, 1, U128_MAX_PLAYERS, opts.workers);
        let big: Layer<BigUint> = mid.into_iter().map(|(k, w)| (k, BigUint::from(w))).collect();
        Ok(into_table(n, grow(big, U128_MAX_PLAYERS, n, opts.workers)))
    }
}

/// Table for `n + 1` players derived from a validated table for `n` players.
pub fn extend(table: &FrequencyTable) -> Result<FrequencyTable> {
    extend_with(table, None)
}

pub fn extend_with(table: &FrequencyTable, workers: Option<usize>) -> Result<FrequencyTable> {
    table.validate()?;
    let n = table.n();
    if n + 1 > u8::MAX as usize {
        return Err(Error::Argument(format!("n = {n} is too large to extend")));
    }
    if n < U128_MAX_PLAYERS {
        let layer: Layer<u128> = table
            .iter()
            .map(|(k, c)| {
                let w = c.to_u128().expect("count bounded by 2^120");
                (narrow_key(k), w)
            })
            .collect();
        Ok(into_table(n + 1, grow(layer, n, n + 1, workers)))
    } else {
        let layer: Layer<BigUint> = table.iter().map(|(k, c)| (narrow_key(k), c.clone())).collect();
        Ok(into_table(n + 1, grow(layer, n, n + 1, workers)))
    }
}

/// Number of labeled tournaments whose maximum score is attained once.
pub fn unique_max_count(table: &FrequencyTable) -> BigCount {
    table.unique_max_count()
}

/// Exact probability that a uniformly random tournament has a unique maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactResult {
    pub n: usize,
    pub unique_max_count: BigCount,
    /// `2^(n(n-1)/2)`.
    pub total: BigCount,
}

pub fn r_exact(table: &FrequencyTable) -> ExactResult {
    ExactResult {
        n: table.n(),
        unique_max_count: table.unique_max_count(),
        total: tournament_count(table.n()),
    }
}

impl ExactResult {
    /// The probability as a reduced fraction.
    pub fn ratio(&self) -> Ratio<BigUint> {
        Ratio::new(self.unique_max_count.clone(), self.total.clone())
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.ratio();
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion truncated (not rounded) to `digits` places, with
    /// trailing zeros removed.
    pub fn decimal(&self, digits: usize) -> String {
        truncated_decimal(&self.unique_max_count, &self.total, digits)
    }
}

impl fmt::Display for ExactResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.ratio();
        write!(
            f,
            "r_{} = {}/{} = {}/2^{} = {}/{} = {}",
            self.n,
            self.unique_max_count,
            self.total,
            self.unique_max_count,
            game_count(self.n),
            r.numer(),
            r.denom(),
            self.decimal(10)
        )
    }
}

/// `num/den` in decimal, truncated to `digits` places; at least one fractional
/// digit is kept.
pub fn truncated_decimal(num: &BigUint, den: &BigUint, digits: usize) -> String {
    let (whole, rem) = num.div_rem(den);
    let scaled = rem * BigUint::from(10u32).pow(digits as u32) / den;
    let mut frac = format!("{scaled:0>digits$}");
    while frac.len() > 1 && frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        frac.push('0');
    }
    format!("{whole}.{frac}")
}

/// Number of distinct score sequences of `n`-player tournaments, counted
/// directly from Landau's criterion (independent of the table construction).
pub fn score_sequence_count(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    let max_sum = game_count(n);
    // ways[v][s]: nondecreasing Landau-valid prefixes ending in value v with sum s
    let mut ways = vec![vec![BigUint::zero(); max_sum + 1]; n];
    for v in 0..n {
        if v <= max_sum {
            ways[v][v] = BigUint::one();
        }
    }
    for k in 2..=n {
        let floor = game_count(k);
        let mut next = vec![vec![BigUint::zero(); max_sum + 1]; n];
        for v in 0..n {
            for s in 0..=max_sum {
                if ways[v][s].is_zero() {
                    continue;
                }
                for w in v..n {
                    let t = s + w;
                    if t > max_sum {
                        break;
                    }
                    if t >= floor {
                        let add = ways[v][s].clone();
                        next[w][t] += add;
                    }
                }
            }
        }
        ways = next;
    }
    ways.iter().map(|row| row[max_sum].clone()).sum()
}

type Layer<W> = Vec<(Vec<u8>, W)>;

trait Weight: Clone + Send + Sync {
    fn empty() -> Self;
    fn scaled(&self, factor: u64) -> Self;
    fn accumulate(&mut self, other: Self);
    fn into_big(self) -> BigUint;
}

// Only used while 2^(n(n-1)/2) <= 2^120, so no product or sum can overflow.
impl Weight for u128 {
    fn empty() -> Self {
        0
    }
    fn scaled(&self, factor: u64) -> Self {
        self * u128::from(factor)
    }
    fn accumulate(&mut self, other: Self) {
        *self += other;
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Weight for BigUint {
    fn empty() -> Self {
        Zero::zero()
    }
    fn scaled(&self, factor: u64) -> Self {
        self * factor
    }
    fn accumulate(&mut self, other: Self) {
        *self += other;
    }
    fn into_big(self) -> BigUint {
        self
    }
}

fn narrow_key(k: &ScoreMultiset) -> Vec<u8> {
    k.as_slice().iter().map(|&s| s as u8).collect()
}

fn into_table<W: Weight>(n: usize, layer: Layer<W>) -> FrequencyTable {
    let entries: BTreeMap<ScoreMultiset, BigCount> = layer
        .into_iter()
        .map(|(k, w)| {
            let key = ScoreMultiset::from_sorted(k.into_iter().map(u32::from).collect())
                .expect("layer keys are sorted");
            (key, w.into_big())
        })
        .collect();
    FrequencyTable::from_entries(n, entries)
}

/// Advances a layer for `from` players to `to` players.
fn grow<W: Weight>(mut layer: Layer<W>, from: usize, to: usize, workers: Option<usize>) -> Layer<W> {
    let binom = pascal(to);
    for players in from..to {
        layer = match workers {
            Some(1) => step_sequential(&layer, players, &binom),
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("thread pool")
                .install(|| step_parallel(&layer, players, &binom)),
            None => step_parallel(&layer, players, &binom),
        };
    }
    layer
}

fn step_sequential<W: Weight>(layer: &[(Vec<u8>, W)], players: usize, binom: &[Vec<u64>]) -> Layer<W> {
    let mut acc = HashMap::new();
    for (key, w) in layer {
        add_successors(key, w, players, binom, &mut acc);
    }
    sorted(acc)
}

fn step_parallel<W: Weight>(layer: &[(Vec<u8>, W)], players: usize, binom: &[Vec<u64>]) -> Layer<W> {
    let acc = layer
        .par_chunks(64)
        .fold(HashMap::new, |mut acc, chunk| {
            for (key, w) in chunk {
                add_successors(key, w, players, binom, &mut acc);
            }
            acc
        })
        .reduce(HashMap::new, merge);
    sorted(acc)
}

fn merge<W: Weight>(mut a: HashMap<Vec<u8>, W>, b: HashMap<Vec<u8>, W>) -> HashMap<Vec<u8>, W> {
    if a.len() < b.len() {
        return merge(b, a);
    }
    for (k, w) in b {
        a.entry(k).or_insert_with(W::empty).accumulate(w);
    }
    a
}

fn sorted<W>(acc: HashMap<Vec<u8>, W>) -> Layer<W> {
    let mut out: Layer<W> = acc.into_iter().collect();
    out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Emits every multiset reachable by adding player number `players` (0-based)
/// to a tournament with sorted scores `key`.
fn add_successors<W: Weight>(
    key: &[u8],
    weight: &W,
    players: usize,
    binom: &[Vec<u64>],
    acc: &mut HashMap<Vec<u8>, W>,
) {
    debug_assert_eq!(key.len(), players);
    // (value, multiplicity) runs of the sorted key
    let mut classes: Vec<(u8, u8)> = Vec::new();
    for &s in key {
        match classes.last_mut() {
            Some((v, m)) if *v == s => *m += 1,
            _ => classes.push((s, 1)),
        }
    }
    // picks[c]: how many players of class c beat the newcomer
    let mut picks = vec![0u8; classes.len()];
    let mut counts = vec![0u8; players + 1];
    let mut next = Vec::with_capacity(players + 1);
    loop {
        counts.iter_mut().for_each(|c| *c = 0);
        let mut factor = 1u64;
        let mut beaten_by = 0usize;
        for (&(v, m), &k) in classes.iter().zip(&picks) {
            counts[v as usize] += m - k;
            counts[v as usize + 1] += k;
            factor *= binom[m as usize][k as usize];
            beaten_by += k as usize;
        }
        counts[players - beaten_by] += 1;
        next.clear();
        for (v, &c) in counts.iter().enumerate() {
            next.extend(std::iter::repeat_n(v as u8, c as usize));
        }
        let contribution = weight.scaled(factor);
        match acc.get_mut(next.as_slice()) {
            Some(w) => w.accumulate(contribution),
            None => {
                acc.insert(next.clone(), contribution);
            }
        }

        // odometer over picks
        let mut c = 0;
        loop {
            if c == picks.len() {
                return;
            }
            if picks[c] < classes[c].1 {
                picks[c] += 1;
                break;
            }
            picks[c] = 0;
            c += 1;
        }
    }
}

fn pascal(n: usize) -> Vec<Vec<u64>> {
    let mut rows = vec![vec![1u64]];
    for m in 1..=n {
        let prev = &rows[m - 1];
        let mut row = vec![1u64; m + 1];
        for k in 1..m {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}
