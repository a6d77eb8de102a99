//! Brute-force ground truth over all `2^(n(n-1)/2)` labeled tournaments.
//!
//! Outcome vectors are the bits of a counter: bit `g` decides pair `g` in
//! lexicographic order `(0,1), (0,2), ..., (n-2,n-1)`, and a set bit means
//! the lower-indexed player won. Only practical for `n <= 7`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tournament::{game_count, tournament_count, BigCount, FrequencyTable, ScoreMultiset};

pub const MAX_ORACLE_PLAYERS: usize = 7;

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Argument("player count must be at least 1".into()));
    }
    if n > MAX_ORACLE_PLAYERS {
        return Err(Error::Argument(format!(
            "brute force over 2^{} tournaments refused for n = {n} (limit {MAX_ORACLE_PLAYERS})",
            game_count(n)
        )));
    }
    Ok(())
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Player-order scores of tournament number `mask`.
fn scores_of(mask: u32, pairs: &[(usize, usize)], out: &mut [u8]) {
    out.iter_mut().for_each(|s| *s = 0);
    for (g, &(i, j)) in pairs.iter().enumerate() {
        if mask >> g & 1 == 1 {
            out[i] += 1;
        } else {
            out[j] += 1;
        }
    }
}

/// Frequency table built by visiting every tournament.
pub fn enumerate_all(n: usize) -> Result<FrequencyTable> {
    check_size(n)?;
    let pairs = pairs(n);
    let total: u32 = 1 << pairs.len();
    let chunk = 1 << 12;
    let counts: HashMap<Vec<u8>, u64> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .fold(HashMap::new, |mut acc, c| {
            let mut s = vec![0u8; n];
            for mask in c * chunk..((c + 1) * chunk).min(total) {
                scores_of(mask, &pairs, &mut s);
                s.sort_unstable();
                *acc.entry(s.clone()).or_insert(0u64) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let entries: BTreeMap<ScoreMultiset, BigCount> = counts
        .into_iter()
        .map(|(k, v)| {
            let key = ScoreMultiset::new(k.into_iter().map(u32::from).collect());
            (key, BigCount::from(v))
        })
        .collect();
    Ok(FrequencyTable::from_entries(n, entries))
}

/// Number of tournaments on `n` players with score exactly `s` for every
/// `(player, s)` constraint.
pub fn joint_score_count(n: usize, constraints: &[(usize, u32)]) -> Result<BigCount> {
    Census::new(n)?.joint_count(constraints)
}

/// Both sides of the negative-dependence inequality
/// `P(s_0 < k_0, ..., s_{m-1} < k_{m-1}) <= prod_i P(s_i < k_i)`
/// (or with `<=` throughout when `strict` is false), over the first `m` players.
pub fn huber_check(n: usize, thresholds: &[u32], strict: bool) -> Result<HuberCheck> {
    Census::new(n)?.huber_check(thresholds, strict)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HuberCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub holds: bool,
}

/// Mean and variance of `Y_t`, the number of players with score above `t`.
pub fn y_moments(n: usize, t: u32) -> Result<(BigRational, BigRational)> {
    Ok(Census::new(n)?.y_moments(t))
}

/// `counts[v]` = number of tournaments whose maximum score is `v`.
pub fn max_score_counts(table: &FrequencyTable) -> Vec<BigCount> {
    let mut counts = vec![BigCount::zero(); table.n()];
    for (k, c) in table.iter() {
        counts[k.max().unwrap_or(0) as usize] += c;
    }
    counts
}

/// A threshold vector and the check it failed.
pub type Violation = (Vec<u32>, HuberCheck);

/// Player-order score vectors of every tournament on `n <= 7` players,
/// cached for repeated exact queries.
pub struct Census {
    n: usize,
    scores: Vec<u8>,
}

impl Census {
    pub fn new(n: usize) -> Result<Self> {
        check_size(n)?;
        let pairs = pairs(n);
        let total = 1usize << pairs.len();
        let mut scores = vec![0u8; total * n];
        scores
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(mask, out)| scores_of(mask as u32, &pairs, out));
        Ok(Census { n, scores })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.scores.chunks_exact(self.n)
    }

    fn total(&self) -> BigUint {
        tournament_count(self.n)
    }

    fn prob(&self, count: u64) -> BigRational {
        BigRational::new(BigInt::from(count), BigInt::from(self.total()))
    }

    pub fn joint_count(&self, constraints: &[(usize, u32)]) -> Result<BigCount> {
        for (idx, &(p, s)) in constraints.iter().enumerate() {
            if p >= self.n {
                return Err(Error::Argument(format!("player {p} out of range for n = {}", self.n)));
            }
            if s as usize >= self.n {
                return Err(Error::Argument(format!("score {s} out of range for n = {}", self.n)));
            }
            if constraints[..idx].iter().any(|&(q, _)| q == p) {
                return Err(Error::Argument(format!("player {p} constrained twice")));
            }
        }
        let hits = self
            .rows()
            .filter(|row| constraints.iter().all(|&(p, s)| u32::from(row[p]) == s))
            .count();
        Ok(BigCount::from(hits))
    }

    pub fn huber_check(&self, thresholds: &[u32], strict: bool) -> Result<HuberCheck> {
        if thresholds.len() > self.n {
            return Err(Error::Argument(format!(
                "{} thresholds for {} players",
                thresholds.len(),
                self.n
            )));
        }
        let below = |s: u8, k: u32| if strict { u32::from(s) < k } else { u32::from(s) <= k };
        let joint = self
            .rows()
            .filter(|row| thresholds.iter().enumerate().all(|(i, &k)| below(row[i], k)))
            .count() as u64;
        let mut rhs = BigRational::one();
        for (i, &k) in thresholds.iter().enumerate() {
            let marginal = self.rows().filter(|row| below(row[i], k)).count() as u64;
            rhs *= self.prob(marginal);
        }
        let lhs = self.prob(joint);
        let holds = lhs <= rhs;
        Ok(HuberCheck { lhs, rhs, holds })
    }

    /// Checks every threshold vector in `{0..=n}^m` over the first `m` players.
    /// Returns the number of vectors checked and the first violation, if any.
    pub fn huber_grid(&self, m: usize, strict: bool) -> Result<(usize, Option<Violation>)> {
        if m > self.n {
            return Err(Error::Argument(format!("m = {m} exceeds n = {}", self.n)));
        }
        let side = self.n + 1;
        // joint histogram of the first m scores
        let mut hist = vec![0u64; self.n.pow(m as u32)];
        let mut marg = vec![vec![0u64; self.n]; m];
        for row in self.rows() {
            let mut cell = 0;
            for i in 0..m {
                cell = cell * self.n + row[i] as usize;
                marg[i][row[i] as usize] += 1;
            }
            hist[cell] += 1;
        }
        let total = self.total();
        let cells = side.pow(m as u32);
        let mut k = vec![0u32; m];
        for idx in 0..cells {
            let mut rest = idx;
            for slot in k.iter_mut().rev() {
                *slot = (rest % side) as u32;
                rest /= side;
            }
            let limit: Vec<usize> = k
                .iter()
                .map(|&ki| if strict { ki as usize } else { (ki as usize + 1).min(self.n) })
                .collect();
            let joint: u64 = hist
                .iter()
                .enumerate()
                .filter(|&(cell, _)| {
                    let mut c = cell;
                    (0..m).rev().all(|i| {
                        let s = c % self.n;
                        c /= self.n;
                        s < limit[i]
                    })
                })
                .map(|(_, &h)| h)
                .sum();
            // lhs <= rhs  <=>  joint * total^(m-1) <= prod marginals
            let mut prod = BigUint::one();
            for i in 0..m {
                prod *= marg[i][..limit[i]].iter().sum::<u64>();
            }
            let scaled = BigUint::from(joint) * total.pow(m as u32 - 1);
            if scaled > prod {
                let check = self.huber_check(&k, strict)?;
                return Ok((idx + 1, Some((k, check))));
            }
        }
        Ok((cells, None))
    }

    pub fn y_moments(&self, t: u32) -> (BigRational, BigRational) {
        let mut sum = 0u64;
        let mut sum_sq = 0u64;
        for row in self.rows() {
            let y = row.iter().filter(|&&s| u32::from(s) > t).count() as u64;
            sum += y;
            sum_sq += y * y;
        }
        let mean = self.prob(sum);
        let var = self.prob(sum_sq) - &mean * &mean;
        (mean, var)
    }
}
