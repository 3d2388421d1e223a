//! Append-only JSON-lines cache of count records.
//!
//! One record per line:
//! `{"schema_version":1,"n":4,"gamma":"6","gamma_next_covered":"3","method":"brute","elapsed_s":0.0}`.
//! Counts are decimal strings so no reader has to deal with big integers.
//! Later lines supersede earlier ones for the same `n`.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::count::{recurrence_holds, CountRecord, Method};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub schema_version: u32,
    pub n: usize,
    pub gamma: String,
    pub gamma_next_covered: String,
    pub method: Method,
    pub elapsed_s: f64,
}

impl From<&CountRecord> for RecordJson {
    fn from(rec: &CountRecord) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            n: rec.n,
            gamma: rec.gamma.to_string(),
            gamma_next_covered: rec.gamma_next_covered.to_string(),
            method: rec.method,
            elapsed_s: rec.elapsed,
        }
    }
}

impl TryFrom<RecordJson> for CountRecord {
    type Error = String;

    fn try_from(j: RecordJson) -> std::result::Result<Self, String> {
        if j.schema_version != SCHEMA_VERSION {
            return Err(format!("unsupported schema_version {}", j.schema_version));
        }
        let parse = |field: &str, s: &str| {
            s.parse::<BigUint>()
                .map_err(|_| format!("{field} is not a decimal integer: {s:?}"))
        };
        Ok(CountRecord {
            n: j.n,
            gamma: parse("gamma", &j.gamma)?,
            gamma_next_covered: parse("gamma_next_covered", &j.gamma_next_covered)?,
            method: j.method,
            elapsed: j.elapsed_s,
        })
    }
}

/// Serializes one record as a single JSON line (no trailing newline).
pub fn to_json_line(rec: &CountRecord) -> String {
    serde_json::to_string(&RecordJson::from(rec)).expect("record serializes")
}

pub fn from_json_line(line: &str, line_no: usize) -> Result<CountRecord> {
    let json: RecordJson = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: line_no,
        message: e.to_string(),
    })?;
    CountRecord::try_from(json).map_err(|message| Error::Parse {
        line: line_no,
        message,
    })
}

#[derive(Clone, Debug)]
pub struct ResultsCache {
    path: PathBuf,
}

impl ResultsCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends a record under an exclusive file lock.
    pub fn append(&self, rec: &CountRecord) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| Error::io(&self.path, e))?;
        file.lock().map_err(|e| Error::io(&self.path, e))?;
        let line = to_json_line(rec) + "\n";
        let written = file
            .write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| Error::io(&self.path, e));
        file.unlock().map_err(|e| Error::io(&self.path, e))?;
        written
    }

    /// Newest record per `n`. A missing file is an empty cache. Fails if a
    /// record breaks its own invariants or the recurrence with its neighbour.
    pub fn load(&self) -> Result<BTreeMap<usize, CountRecord>> {
        let file = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(BTreeMap::new()),
            Err(e) => return Err(Error::io(&self.path, e)),
        };
        file.lock_shared().map_err(|e| Error::io(&self.path, e))?;
        let mut records = BTreeMap::new();
        for (idx, line) in BufReader::new(&file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(&self.path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec = from_json_line(&line, idx + 1)?;
            records.insert(rec.n, rec);
        }
        file.unlock().map_err(|e| Error::io(&self.path, e))?;
        self.check(&records)?;
        Ok(records)
    }

    fn check(&self, records: &BTreeMap<usize, CountRecord>) -> Result<()> {
        let inconsistent = |n, detail: String| Error::CacheInconsistent {
            path: self.path.clone(),
            n,
            detail,
        };
        for rec in records.values() {
            if !rec.is_consistent() {
                return Err(inconsistent(rec.n, "counts violate 0 <= next <= gamma <= 2^(n+1), gamma >= 1".into()));
            }
        }
        for (n, rec) in records {
            if let Some(next) = records.get(&(n + 1)) {
                if !recurrence_holds(rec, next) {
                    return Err(inconsistent(
                        n + 1,
                        format!(
                            "gamma {} != {} + {} from n = {n}",
                            next.gamma, rec.gamma, rec.gamma_next_covered
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}
