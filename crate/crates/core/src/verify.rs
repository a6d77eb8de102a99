//! Invariant suite run by `tourney verify --n N`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::binomial::ExactRow;
use crate::bounds::{ey_exact, pair_prob_exact, var_y_exact};
use crate::error::Result;
use crate::exact::{expand, extend, score_sequence_count};
use crate::oracle::{enumerate_all, Census};
use crate::tournament::{tournament_count, FrequencyTable};

/// Number of labeled tournaments with a unique top score, `n = 1..=12`
/// (OEIS A013976).
pub const UNIQUE_MAX_COUNTS: [&str; 12] = [
    "1",
    "2",
    "6",
    "32",
    "600",
    "20544",
    "1218224",
    "160241152",
    "42129744768",
    "21293228876800",
    "22220602090444032",
    "45959959305969143808",
];

pub fn known_unique_max_count(n: usize) -> Option<BigUint> {
    let s = UNIQUE_MAX_COUNTS.get(n.checked_sub(1)?)?;
    BigUint::parse_bytes(s.as_bytes(), 10)
}

/// The 9-player sequence whose historical count was short by 10,000.
pub const CORRECTED_SEQUENCE: [u32; 9] = [2, 2, 3, 3, 4, 4, 6, 6, 6];
pub const CORRECTED_COUNT: u64 = 361_307_520;

/// Largest `n` for which halving-identity rows are checked.
const HALVING_MAX: u64 = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| !c.passed)
    }

    fn record(&mut self, name: impl Into<String>, outcome: std::result::Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.checks.push(CheckOutcome {
            name: name.into(),
            passed,
            detail,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "ok  " } else { "FAIL" };
            writeln!(f, "{tag} {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Runs every check that applies up to `n` players. Errors only when the
/// tables themselves cannot be built (for example `n` above the limit).
pub fn verify(n: usize) -> Result<VerifyReport> {
    let tables: Vec<FrequencyTable> = (1..=n).map(expand).collect::<Result<_>>()?;
    let mut report = VerifyReport::default();

    report.record("table invariants", {
        tables
            .iter()
            .try_for_each(|t| t.validate().map_err(|e| format!("n = {}: {e}", t.n())))
            .map(|_| format!("conservation, complement symmetry, Landau keys for n = 1..={n}"))
    });

    report.record("score sequence counts", {
        tables
            .iter()
            .try_for_each(|t| {
                let want = score_sequence_count(t.n());
                if BigUint::from(t.len()) == want {
                    Ok(())
                } else {
                    Err(format!("n = {}: {} keys, Landau count {want}", t.n(), t.len()))
                }
            })
            .map(|_| format!("n = 1..={n}"))
    });

    report.record("unique-max counts", {
        let mut checked = 0;
        tables
            .iter()
            .try_for_each(|t| {
                let Some(want) = known_unique_max_count(t.n()) else {
                    return Ok(());
                };
                checked += 1;
                let got = t.unique_max_count();
                if got == want {
                    Ok(())
                } else {
                    Err(format!("n = {}: got {got}, expected {want}", t.n()))
                }
            })
            .map(|_| format!("{checked} known values"))
    });

    if n >= 9 {
        report.record("corrected 9-player count", {
            let c = tables[8].count_of(&CORRECTED_SEQUENCE);
            if c == BigUint::from(CORRECTED_COUNT) && (&c % 9u32).to_u32() == Some(0) {
                Ok(format!("{c}, divisible by 9"))
            } else {
                Err(format!("got {c}"))
            }
        });
    }

    report.record("extension equivalence", {
        tables
            .windows(2)
            .try_for_each(|w| match extend(&w[0]) {
                Ok(next) if next == w[1] => Ok(()),
                Ok(_) => Err(format!("extend(n = {}) differs from expand(n = {})", w[0].n(), w[1].n())),
                Err(e) => Err(e.to_string()),
            })
            .map(|_| format!("n = 1..{n}"))
    });

    let oracle_max = n.min(6);
    report.record("oracle equivalence", {
        (1..=oracle_max)
            .try_for_each(|k| match enumerate_all(k) {
                Ok(t) if t == tables[k - 1] => Ok(()),
                Ok(_) => Err(format!("n = {k}: brute force differs")),
                Err(e) => Err(e.to_string()),
            })
            .map(|_| format!("n = 1..={oracle_max}"))
    });

    for k in 3..=n.min(5) {
        let census = Census::new(k)?;
        report.record(format!("negative dependence n = {k}"), {
            let mut checked = 0;
            let mut outcome = Ok(());
            'grid: for m in 2..=k {
                for strict in [true, false] {
                    let (count, violation) = census.huber_grid(m, strict)?;
                    checked += count;
                    if let Some((thresholds, c)) = violation {
                        outcome = Err(format!(
                            "m = {m}, strict = {strict}, k = {thresholds:?}: {} > {}",
                            c.lhs, c.rhs
                        ));
                        break 'grid;
                    }
                }
            }
            outcome.map(|_| format!("{checked} threshold vectors"))
        });
    }

    for k in 3..=n.min(6) {
        let census = Census::new(k)?;
        let kk = k as u64;
        report.record(format!("second moment n = {k}"), {
            (0..k as u32)
                .try_for_each(|t| {
                    let (mean, var) = census.y_moments(t);
                    let ti = i64::from(t);
                    if ey_exact(kk, ti)? != mean {
                        return Err(format!("E(Y_{t}) mismatch"));
                    }
                    if var_y_exact(kk, ti)? != var {
                        return Err(format!("Var(Y_{t}) mismatch"));
                    }
                    Ok(())
                })
                .map(|_| "E(Y_t) and Var(Y_t) match brute force for every t".to_string())
        });
        report.record(format!("pair probability n = {k}"), {
            let total = BigInt::from(tournament_count(k));
            (0..k as u32)
                .try_for_each(|h| {
                    let count = census.joint_count(&[(0, h), (1, h)])?;
                    let want = BigRational::new(BigInt::from(count), total.clone());
                    if pair_prob_exact(kk, i64::from(h))? == want {
                        Ok(())
                    } else {
                        Err(format!("h = {h}: closed form differs from brute force"))
                    }
                })
                .map(|_| "P(s_u = s_v = h) matches brute force for every h".to_string())
        });
    }

    report.record("halving identity", {
        let two = BigInt::from(2);
        let mut prev = ExactRow::new(1);
        let mut outcome = Ok(());
        'rows: for k in 3..=HALVING_MAX {
            let row = ExactRow::new(k - 1);
            if prev.m() != k - 2 {
                prev = ExactRow::new(k - 2);
            }
            for t in -1..=(k as i64) {
                if row.tail(t) != (prev.tail(t) + prev.tail(t - 1)) / &two {
                    outcome = Err(format!("n = {k}, t = {t}"));
                    break 'rows;
                }
            }
            prev = row;
        }
        outcome.map(|_| format!("B(n-1,t) = (B(n-2,t) + B(n-2,t-1))/2 for 3 <= n <= {HALVING_MAX}"))
    });

    Ok(report)
}

impl From<crate::error::Error> for String {
    fn from(e: crate::error::Error) -> Self {
        e.to_string()
    }
}
