//! Tournament outcomes, score multisets and score-frequency tables.
//!
//! Players are 0-indexed. A tournament on `n` players fixes, for every pair
//! `i != j`, which of the two won; the score of a player is its number of wins.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative count of labeled tournaments.
pub type BigCount = BigUint;

/// Number of games in an `n`-player round robin.
pub fn game_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// `2^(n(n-1)/2)`, the number of labeled tournaments on `n` players.
pub fn tournament_count(n: usize) -> BigCount {
    BigCount::one() << game_count(n)
}

/// Full win/loss matrix of a labeled tournament, stored as packed bit rows.
///
/// Bit `j` of row `i` is set iff player `i` beats player `j`.
#[derive(Clone, PartialEq, Eq)]
pub struct TournamentMatrix {
    n: usize,
    row_words: usize,
    bits: Vec<u64>,
}

impl TournamentMatrix {
    /// Builds a tournament from a predicate `lower_wins(i, j)` queried once for
    /// every pair `i < j`.
    pub fn from_fn(n: usize, mut lower_wins: impl FnMut(usize, usize) -> bool) -> Self {
        let row_words = n.div_ceil(64).max(1);
        let mut m = TournamentMatrix {
            n,
            row_words,
            bits: vec![0; n * row_words],
        };
        for i in 0..n {
            for j in i + 1..n {
                if lower_wins(i, j) {
                    m.set(i, j);
                } else {
                    m.set(j, i);
                }
            }
        }
        m
    }

    /// Builds a tournament from outcome bits listed in lexicographic pair order
    /// `(0,1), (0,2), ..., (n-2,n-1)`; bit `g` set means the lower-indexed
    /// player of pair `g` won.
    pub fn from_pair_bits(n: usize, mut bit: impl FnMut(usize) -> bool) -> Self {
        let mut g = 0;
        Self::from_fn(n, |_, _| {
            let b = bit(g);
            g += 1;
            b
        })
    }

    /// Builds a tournament from an explicit boolean matrix, checking that
    /// exactly one of `wins[i][j]`, `wins[j][i]` holds for `i != j` and that the
    /// diagonal is empty.
    pub fn from_rows(wins: &[Vec<bool>]) -> Result<Self> {
        let n = wins.len();
        for (i, row) in wins.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Argument(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[i] {
                return Err(Error::Argument(format!("player {i} beats itself")));
            }
            for j in i + 1..n {
                if wins[i][j] == wins[j][i] {
                    return Err(Error::Argument(format!(
                        "pair ({i}, {j}) must have exactly one winner"
                    )));
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| wins[i][j]))
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.row_words + j / 64] |= 1 << (j % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Whether player `i` beat player `j`.
    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.row_words + j / 64] >> (j % 64) & 1 == 1
    }

    /// Scores in player order (not sorted).
    pub fn player_scores(&self) -> Vec<u32> {
        self.bits
            .chunks_exact(self.row_words)
            .take(self.n)
            .map(|row| row.iter().map(|w| w.count_ones()).sum())
            .collect()
    }

    /// The score multiset of this tournament.
    pub fn scores(&self) -> ScoreMultiset {
        ScoreMultiset::new(self.player_scores())
    }

    /// The tournament with every result reversed.
    pub fn reversed(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.beats(j, i))
    }
}

impl fmt::Debug for TournamentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TournamentMatrix(n = {})", self.n)?;
        for i in 0..self.n {
            let row: String = (0..self.n)
                .map(|j| if self.beats(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

/// Scores of a (possibly partial) tournament in canonical nondecreasing order.
///
/// Ordering and equality are lexicographic on the sorted sequence, which is
/// the order used for table keys and file rows.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScoreMultiset {
    scores: Vec<u32>,
}

impl ScoreMultiset {
    /// Sorts `scores` into canonical form.
    pub fn new(mut scores: Vec<u32>) -> Self {
        scores.sort_unstable();
        ScoreMultiset { scores }
    }

    /// Wraps an already nondecreasing sequence.
    pub fn from_sorted(scores: Vec<u32>) -> Result<Self> {
        if scores.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Argument(format!(
                "score sequence {scores:?} is not nondecreasing"
            )));
        }
        Ok(ScoreMultiset { scores })
    }

    pub fn n(&self) -> usize {
        self.scores.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.scores
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.scores
    }

    pub fn max(&self) -> Option<u32> {
        self.scores.last().copied()
    }

    pub fn total(&self) -> u64 {
        self.scores.iter().map(|&s| u64::from(s)).sum()
    }

    /// Whether the sum matches a complete tournament on `n()` players.
    pub fn is_complete(&self) -> bool {
        self.total() == game_count(self.n()) as u64
    }

    /// True iff the largest score occurs exactly once.
    pub fn unique_max(&self) -> bool {
        match self.scores.as_slice() {
            [] => false,
            [_] => true,
            [.., a, b] => a != b,
        }
    }

    /// True iff the smallest score occurs exactly once.
    pub fn unique_min(&self) -> bool {
        match self.scores.as_slice() {
            [] => false,
            [_] => true,
            [a, b, ..] => a != b,
        }
    }

    /// Scores of the reversed tournament: `x -> n - 1 - x`, re-sorted.
    ///
    /// Panics if a score exceeds `n - 1`.
    pub fn complement(&self) -> ScoreMultiset {
        let top = self.n().saturating_sub(1) as u32;
        let scores = self
            .scores
            .iter()
            .rev()
            .map(|&s| {
                assert!(s <= top, "score {s} exceeds n - 1 = {top}");
                top - s
            })
            .collect();
        ScoreMultiset { scores }
    }

    /// Landau's criterion: every prefix of length `k` sums to at least
    /// `k(k-1)/2` and the total is `n(n-1)/2`.
    pub fn landau_valid(&self) -> bool {
        landau_valid(&self.scores)
    }
}

impl fmt::Display for ScoreMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.scores.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Whether a player-order score vector has exactly one player at the maximum.
pub fn unique_max_unsorted(scores: &[u32]) -> bool {
    let Some(&top) = scores.iter().max() else {
        return false;
    };
    scores.iter().filter(|&&s| s == top).count() == 1
}

/// Landau's criterion on a sequence that must already be nondecreasing.
/// Returns false for unsorted input.
pub fn landau_valid(sorted: &[u32]) -> bool {
    let mut prefix = 0u64;
    for (k, pair) in sorted.iter().enumerate() {
        if k > 0 && sorted[k - 1] > *pair {
            return false;
        }
        prefix += u64::from(*pair);
        let len = k as u64 + 1;
        if prefix < len * (len - 1) / 2 {
            return false;
        }
    }
    prefix == game_count(sorted.len()) as u64
}

/// Number of labeled `n`-player tournaments realizing each score multiset:
/// the coefficients of `prod_{i<j} (a_i + a_j)` grouped by exponent multiset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyTable {
    n: usize,
    entries: BTreeMap<ScoreMultiset, BigCount>,
}

impl FrequencyTable {
    /// Builds a table without checking its invariants; see [`validate`](Self::validate).
    pub fn from_entries(n: usize, entries: BTreeMap<ScoreMultiset, BigCount>) -> Self {
        FrequencyTable { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &ScoreMultiset) -> Option<&BigCount> {
        self.entries.get(key)
    }

    /// Count for a sorted score list, zero if absent.
    pub fn count_of(&self, scores: &[u32]) -> BigCount {
        self.entries
            .get(&ScoreMultiset::new(scores.to_vec()))
            .cloned()
            .unwrap_or_default()
    }

    /// Entries in lexicographic key order.
    pub fn iter(&self) -> impl Iterator<Item = (&ScoreMultiset, &BigCount)> {
        self.entries.iter()
    }

    pub fn entries(&self) -> &BTreeMap<ScoreMultiset, BigCount> {
        &self.entries
    }

    pub fn into_entries(self) -> BTreeMap<ScoreMultiset, BigCount> {
        self.entries
    }

    pub fn total(&self) -> BigCount {
        self.entries.values().sum()
    }

    /// Total weight of multisets whose maximum occurs exactly once.
    pub fn unique_max_count(&self) -> BigCount {
        self.entries
            .iter()
            .filter(|(k, _)| k.unique_max())
            .map(|(_, c)| c)
            .sum()
    }

    /// Checks every table invariant: key length and Landau validity, nonzero
    /// counts, complement symmetry and total `2^(n(n-1)/2)`.
    pub fn validate(&self) -> Result<()> {
        for (key, count) in &self.entries {
            if key.n() != self.n {
                return Err(Error::Integrity(format!(
                    "key ({key}) has {} scores but the table is for n = {}",
                    key.n(),
                    self.n
                )));
            }
            if !key.landau_valid() {
                return Err(Error::Integrity(format!(
                    "key ({key}) is not a valid score sequence"
                )));
            }
            if count.is_zero() {
                return Err(Error::Integrity(format!("key ({key}) has a zero count")));
            }
            let comp = key.complement();
            match self.entries.get(&comp) {
                Some(c) if c == count => {}
                Some(c) => {
                    return Err(Error::Integrity(format!(
                        "complement symmetry violated: ({key}) has {count} but ({comp}) has {c}"
                    )))
                }
                None => {
                    return Err(Error::Integrity(format!(
                        "complement symmetry violated: ({key}) present but ({comp}) missing"
                    )))
                }
            }
        }
        let total = self.total();
        let expected = tournament_count(self.n);
        if total != expected {
            return Err(Error::Integrity(format!(
                "counts sum to {total}, expected 2^{} = {expected}",
                game_count(self.n)
            )));
        }
        Ok(())
    }
}
