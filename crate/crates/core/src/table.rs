//! Text format for frequency tables.
//!
//! ```text
//! # tourney score-frequency table v1
//! # n=3
//! # generator=tourney-core 0.1.0 expand
//! 0,1,2	6
//! 1,1,1	2
//! ```
//!
//! One row per score multiset in increasing lexicographic order: the sorted
//! scores separated by commas, a tab, then the count in decimal.

#![allow(clippy::tabs_in_doc_comments)]

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::tournament::{landau_valid, tournament_count, BigCount, FrequencyTable, ScoreMultiset};

pub const FORMAT_HEADER: &str = "# tourney score-frequency table v1";

/// How a table was produced; recorded in the `generator` header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Expand,
    Extend,
    Oracle,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Expand => "expand",
            Provenance::Extend => "extend",
            Provenance::Oracle => "oracle",
        }
    }
}

pub fn generator_string(p: Provenance) -> String {
    format!("tourney-core {} {}", env!("CARGO_PKG_VERSION"), p.as_str())
}

pub fn write_table<W: Write>(table: &FrequencyTable, provenance: Provenance, mut out: W) -> Result<()> {
    writeln!(out, "{FORMAT_HEADER}")?;
    writeln!(out, "# n={}", table.n())?;
    writeln!(out, "# generator={}", generator_string(provenance))?;
    for (key, count) in table.iter() {
        writeln!(out, "{key}\t{count}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn table_to_string(table: &FrequencyTable, provenance: Provenance) -> String {
    let mut buf = Vec::new();
    write_table(table, provenance, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// A parsed table file.
#[derive(Clone, Debug, PartialEq)]
pub struct TableFile {
    pub generator: Option<String>,
    pub table: FrequencyTable,
}

/// Parses a table file. Structure (header, row syntax, row length, strict
/// ordering) is always checked; with `verify` every table invariant is
/// checked as well, and errors name the first offending line.
pub fn read_table<R: BufRead>(input: R, verify: bool) -> Result<TableFile> {
    let mut n: Option<usize> = None;
    let mut generator = None;
    let mut entries = BTreeMap::new();
    let mut lines_of: HashMap<ScoreMultiset, usize> = HashMap::new();
    let mut last: Option<ScoreMultiset> = None;

    for (idx, line) in input.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let err = |reason: String| Error::Parse { line: lineno, reason };
        if lineno == 1 {
            if line.trim_end() != FORMAT_HEADER {
                return Err(err(format!("expected format header {FORMAT_HEADER:?}")));
            }
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let meta = meta.trim();
            if let Some(v) = meta.strip_prefix("n=") {
                if n.is_some() {
                    return Err(err("player count declared twice".into()));
                }
                n = Some(v.parse().map_err(|_| err(format!("bad player count {v:?}")))?);
            } else if let Some(v) = meta.strip_prefix("generator=") {
                generator = Some(v.to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let n = n.ok_or_else(|| err("row before the `# n=` header".into()))?;
        let (scores, count) = line
            .split_once('\t')
            .ok_or_else(|| err("expected `scores<TAB>count`".into()))?;
        let scores: Vec<u32> = scores
            .split(',')
            .map(|s| s.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(format!("malformed scores {scores:?}")))?;
        if scores.len() != n {
            return Err(err(format!("row has {} scores, expected {n}", scores.len())));
        }
        let key = ScoreMultiset::from_sorted(scores).map_err(|e| err(e.to_string()))?;
        let count = BigUint::parse_bytes(count.trim().as_bytes(), 10)
            .ok_or_else(|| err(format!("malformed count {count:?}")))?;
        if let Some(prev) = &last {
            if *prev == key {
                return Err(err(format!("duplicate key ({key})")));
            }
            if *prev > key {
                return Err(err(format!("key ({key}) is out of order")));
            }
        }
        if verify {
            if !landau_valid(key.as_slice()) {
                return Err(Error::Integrity(format!(
                    "line {lineno}: ({key}) is not a valid score sequence"
                )));
            }
            if count.is_zero() {
                return Err(Error::Integrity(format!("line {lineno}: zero count for ({key})")));
            }
        }
        last = Some(key.clone());
        lines_of.insert(key.clone(), lineno);
        entries.insert(key, count);
    }

    let n = n.ok_or_else(|| Error::Parse {
        line: 0,
        reason: "missing `# n=` header".into(),
    })?;
    if verify {
        verify_entries(n, &entries, &lines_of)?;
    }
    Ok(TableFile {
        generator,
        table: FrequencyTable::from_entries(n, entries),
    })
}

fn verify_entries(
    n: usize,
    entries: &BTreeMap<ScoreMultiset, BigCount>,
    lines_of: &HashMap<ScoreMultiset, usize>,
) -> Result<()> {
    for (key, count) in entries {
        let comp = key.complement();
        if entries.get(&comp) != Some(count) {
            return Err(Error::Integrity(format!(
                "line {}: count for ({key}) differs from its complement ({comp})",
                lines_of[key]
            )));
        }
    }
    let total: BigCount = entries.values().sum();
    let expected = tournament_count(n);
    if total != expected {
        return Err(Error::Integrity(format!(
            "counts sum to {total}, expected 2^{} = {expected}",
            crate::tournament::game_count(n)
        )));
    }
    Ok(())
}
