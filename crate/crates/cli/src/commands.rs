use std::collections::BTreeMap;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use twobase::bounds::{self, BoundEvalJson};
use twobase::cache::{to_json_line, ResultsCache};
use twobase::count::{CountRecord, GrowthRow, Method};
use twobase::oeis::{self, BFile, Outcome};
use twobase::probability::{mc_uncovered, McReport};

use crate::config::Config;
use crate::McKind;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] twobase::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(twobase::Error::LimitExceeded { .. }) => 2,
            CliError::Core(twobase::Error::Parse { .. }) => 4,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }

    fn stdout(source: io::Error) -> Self {
        CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }
    }
}

pub type CliResult = Result<(), CliError>;

/// Counts by `n`, served from the results cache where possible and appended
/// to it otherwise.
pub struct Counts<'a> {
    cfg: &'a Config,
    cache: Option<ResultsCache>,
    known: BTreeMap<usize, CountRecord>,
}

impl<'a> Counts<'a> {
    pub fn open(cfg: &'a Config) -> Result<Self, CliError> {
        let cache = cfg.cache();
        let known = match &cache {
            Some(c) => c.load()?,
            None => BTreeMap::new(),
        };
        Ok(Self { cfg, cache, known })
    }

    pub fn get(&mut self, n: usize) -> Result<CountRecord, CliError> {
        if let Some(rec) = self.known.get(&n) {
            return Ok(rec.clone());
        }
        let rec = self.cfg.counter().count_auto(n)?;
        self.remember(&rec)?;
        Ok(rec)
    }

    fn remember(&mut self, rec: &CountRecord) -> CliResult {
        if let Some(c) = &self.cache {
            c.append(rec)?;
        }
        self.known.insert(rec.n, rec.clone());
        Ok(())
    }

    pub fn rows(&mut self, n_max: usize) -> Result<Vec<GrowthRow>, CliError> {
        (0..=n_max)
            .map(|n| self.get(n).map(|r| GrowthRow::from(&r)))
            .collect()
    }
}

pub fn count(cfg: &Config, n: usize, method: Method, partition_depth: usize) -> CliResult {
    let mut counter = cfg.counter();
    counter.partition_depth = partition_depth;
    let rec = counter.count(n, method)?;
    if let Some(cache) = cfg.cache() {
        cache.append(&rec)?;
    }
    println!("{}", to_json_line(&rec));
    Ok(())
}

pub fn enumerate(cfg: &Config, n: usize) -> CliResult {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut failure = None;
    let total = cfg.counter().enumerate(n, |base| {
        if failure.is_none() {
            if let Err(e) = writeln!(out, "{base}") {
                failure = Some(e);
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(CliError::stdout(e));
    }
    out.flush().map_err(CliError::stdout)?;
    eprintln!("# {total} bases for n = {n}");
    Ok(())
}

pub const CSV_HEADER: &str =
    "n,gamma,gamma_next_covered,delta_num,delta_den,ratio_num,ratio_den,ratio_float";

pub fn csv_row(row: &GrowthRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        row.n,
        row.gamma,
        row.gamma_next_covered,
        row.delta.numer(),
        row.delta.denom(),
        row.ratio.numer(),
        row.ratio.denom(),
        row.ratio_float
    )
}

pub fn table(cfg: &Config, n_max: usize, out: Option<&Path>) -> CliResult {
    let rows = Counts::open(cfg)?.rows(n_max)?;
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in &rows {
        text.push_str(&csv_row(row));
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(CliError::stdout),
    }
}

pub fn mc(cfg: &Config, kind: McKind, n: usize, k: Option<i64>, samples: u64) -> CliResult {
    let ks: Vec<usize> = match kind {
        McKind::Uncovered => (0..=n).collect(),
        McKind::Notgen => {
            let k = k.ok_or_else(|| {
                twobase::Error::BadArgument("`mc notgen` needs --k".into())
            })?;
            if k < 0 || k as usize > n + 1 {
                return Err(twobase::Error::BadArgument(format!(
                    "k = {k} is outside [0, {}]",
                    n + 1
                ))
                .into());
            }
            vec![k as usize]
        }
    };
    let stats = mc_uncovered(n, samples, cfg.seed, cfg.exec())?;
    let report = McReport::new(&stats, ks)?;
    println!(
        "{}",
        serde_json::to_string(&report).map_err(twobase::Error::from)?
    );
    Ok(())
}

pub fn bounds_eval(n: usize) -> CliResult {
    let json = BoundEvalJson::from(&bounds::evaluate(n));
    println!("{}", serde_json::to_string(&json).map_err(twobase::Error::from)?);
    Ok(())
}

pub fn bounds_n0() -> CliResult {
    let th = bounds::find_n0();
    println!("{}", serde_json::to_string(&th).map_err(twobase::Error::from)?);
    Ok(())
}

pub fn oeis_check(cfg: &Config, path: &Path, max_n: Option<usize>) -> CliResult {
    let bfile = BFile::read(path)?;
    if let Some(w) = bfile.offset_warning() {
        eprintln!("warning: {w}");
    }
    let reach = cfg.dfs_ceiling.min(max_n.unwrap_or(usize::MAX));
    let mut counts = Counts::open(cfg)?;
    let lines = oeis::check(&bfile, |n| {
        (n <= reach).then(|| {
            counts.get(n).map(|r| r.gamma).map_err(|e| match e {
                CliError::Core(core) => core,
                other => twobase::Error::BadArgument(other.to_string()),
            })
        })
    });
    let (mut matched, mut mismatched, mut skipped) = (0, 0, 0);
    for line in &lines {
        match &line.outcome {
            Outcome::Match => {
                matched += 1;
                println!("match    n={} gamma={}", line.index, line.expected);
            }
            Outcome::Mismatch { local } => {
                mismatched += 1;
                println!(
                    "MISMATCH n={} bfile={} local={}",
                    line.index, line.expected, local
                );
            }
            Outcome::Skipped(reason) => {
                skipped += 1;
                println!("skipped  n={} ({reason})", line.index);
            }
        }
    }
    println!("oeis-check: {matched} matched, {mismatched} mismatched, {skipped} skipped");
    if mismatched > 0 {
        return Err(CliError::Verification(format!(
            "{mismatched} b-file entries disagree with local counts"
        )));
    }
    Ok(())
}
