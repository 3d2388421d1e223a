//! OEIS b-file parsing and comparison against locally computed values.

use std::path::Path;

use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Parsed b-file: `index value` lines, `#` comments and blank lines ignored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BFile {
    pub entries: Vec<(usize, BigUint)>,
}

impl BFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(usize, BigUint)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut parts = line.split_whitespace();
            let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected `index value`, got {line:?}")));
            };
            let index: usize = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
            let value: BigUint = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
            if value.is_zero() {
                return Err(err(format!("value at index {index} is zero")));
            }
            if let Some((prev, _)) = entries.last() {
                if index <= *prev {
                    return Err(err(format!("index {index} does not increase past {prev}")));
                }
            }
            entries.push((index, value));
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Warning text when the first index is not 0. Entries are still
    /// aligned by their index value.
    pub fn offset_warning(&self) -> Option<String> {
        match self.entries.first() {
            Some((first, _)) if *first != 0 => Some(format!(
                "b-file starts at index {first}, expected 0; aligning by index"
            )),
            _ => None,
        }
    }

    pub fn get(&self, index: usize) -> Option<&BigUint> {
        self.entries
            .binary_search_by_key(&index, |(i, _)| *i)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Match,
    Mismatch { local: BigUint },
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckLine {
    pub index: usize,
    pub expected: BigUint,
    pub outcome: Outcome,
}

/// Compares every entry against `local(index)`. `local` returns `None` to
/// skip an index (beyond ceilings) and `Some(Err)` to record a skip with the
/// error text.
pub fn check<F>(bfile: &BFile, mut local: F) -> Vec<CheckLine>
where
    F: FnMut(usize) -> Option<Result<BigUint>>,
{
    bfile
        .entries
        .iter()
        .map(|(index, expected)| {
            let outcome = match local(*index) {
                None => Outcome::Skipped("beyond computing ceiling".into()),
                Some(Err(e)) => Outcome::Skipped(e.to_string()),
                Some(Ok(v)) if &v == expected => Outcome::Match,
                Some(Ok(v)) => Outcome::Mismatch { local: v },
            };
            CheckLine {
                index: *index,
                expected: expected.clone(),
                outcome,
            }
        })
        .collect()
}
