use std::path::PathBuf;

use clap::Args;
use twobase::{Ceilings, Counter, Exec};

pub const DEFAULT_CACHE: &str = "twobase-cache.jsonl";

/// Flags shared by every subcommand. Each falls back to a `TWOBASE_*`
/// environment variable.
#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Largest n for exhaustive counting.
    #[arg(long, global = true, env = "TWOBASE_BRUTE_CEILING", default_value_t = 24)]
    pub brute_ceiling: usize,
    /// Largest n for listing bases.
    #[arg(long, global = true, env = "TWOBASE_ENUM_CEILING", default_value_t = 20)]
    pub enum_ceiling: usize,
    /// Largest n for the depth-first counter.
    #[arg(long, global = true, env = "TWOBASE_DFS_CEILING", default_value_t = 40)]
    pub dfs_ceiling: usize,
    /// Worker threads; 0 picks automatically, 1 runs sequentially.
    #[arg(long, global = true, env = "TWOBASE_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Results cache (JSON lines).
    #[arg(long = "cache", global = true, env = "TWOBASE_CACHE", default_value = DEFAULT_CACHE)]
    pub cache_path: PathBuf,
    /// Do not read or write the results cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Default Monte Carlo seed.
    #[arg(long, global = true, env = "TWOBASE_SEED", default_value_t = 1)]
    pub seed: u64,
}

impl Config {
    pub fn ceilings(&self) -> Ceilings {
        Ceilings {
            brute: self.brute_ceiling,
            enumeration: self.enum_ceiling,
            dfs: self.dfs_ceiling,
        }
    }

    pub fn exec(&self) -> Exec {
        Exec::with_threads(self.threads)
    }

    pub fn counter(&self) -> Counter {
        Counter::new(self.ceilings(), self.exec())
    }

    pub fn cache(&self) -> Option<twobase::cache::ResultsCache> {
        (!self.no_cache).then(|| twobase::cache::ResultsCache::new(&self.cache_path))
    }
}
