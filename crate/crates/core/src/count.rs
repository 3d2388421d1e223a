//! Exact counting of `Γ(n)`, the additive 2-bases for `n`.
//!
//! Two counters are provided. [`Counter::brute`] walks all `2^(n+1)` subsets
//! and is the oracle. [`Counter::dfs`] decides membership of `0, 1, ..., n` in
//! increasing order and prunes as soon as some target in `[n]₀` has lost every
//! representation. Both also count the bases whose sumset contains `n + 1`,
//! which is what the step `|Γ(n+1)| = |Γ(n)| + |{X ∈ Γ(n) : n+1 ∈ X+X}|`
//! needs.

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sumset::{low_mask128, sumset_word, SubsetMask};

/// Largest `n` the single-word kernels support (`n + 1` must fit in 63 bits).
pub const WORD_MAX_N: usize = 62;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Dfs,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Brute => "brute",
            Method::Dfs => "dfs",
        })
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "brute" => Ok(Method::Brute),
            "dfs" => Ok(Method::Dfs),
            other => Err(Error::BadArgument(format!("unknown method {other:?}"))),
        }
    }
}

/// Largest `n` each routine accepts. These are configuration, not hard limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ceilings {
    pub brute: usize,
    pub enumeration: usize,
    pub dfs: usize,
}

impl Default for Ceilings {
    fn default() -> Self {
        Self {
            brute: 24,
            enumeration: 20,
            dfs: 40,
        }
    }
}

/// Exact counting result for one `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub n: usize,
    /// `|Γ(n)|`
    pub gamma: BigUint,
    /// `|{X ∈ Γ(n) : n + 1 ∈ X + X}|`
    pub gamma_next_covered: BigUint,
    pub method: Method,
    /// Wall-clock seconds; informational only.
    pub elapsed: f64,
}

impl CountRecord {
    /// `δ(n)`, in lowest terms.
    pub fn delta(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.gamma_next_covered.clone()),
            BigInt::from(self.gamma.clone()),
        )
    }

    /// `|Γ(n)| / 2^(n+1)`.
    pub fn ratio(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.gamma.clone()),
            BigInt::one() << (self.n + 1),
        )
    }

    /// `0 ≤ gamma_next_covered ≤ gamma ≤ 2^(n+1)` and `gamma ≥ 1`.
    pub fn is_consistent(&self) -> bool {
        self.gamma >= BigUint::one()
            && self.gamma_next_covered <= self.gamma
            && self.gamma <= BigUint::one() << (self.n + 1)
    }

    /// `|Γ(n)| · (n+1)^20 ≥ 2^n`, compared exactly.
    pub fn meets_first_lower_bound(&self) -> bool {
        &self.gamma * BigUint::from(self.n + 1).pow(20) >= BigUint::one() << self.n
    }

    /// Same counts, ignoring method and timing.
    pub fn same_counts(&self, other: &CountRecord) -> bool {
        self.n == other.n
            && self.gamma == other.gamma
            && self.gamma_next_covered == other.gamma_next_covered
    }
}

/// One row of the growth table.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub n: usize,
    pub gamma: BigUint,
    pub gamma_next_covered: BigUint,
    pub delta: BigRational,
    /// `r(n) = |Γ(n)| / 2^(n+1)`
    pub ratio: BigRational,
    pub ratio_float: f64,
}

impl From<&CountRecord> for GrowthRow {
    fn from(rec: &CountRecord) -> Self {
        let ratio = rec.ratio();
        Self {
            n: rec.n,
            gamma: rec.gamma.clone(),
            gamma_next_covered: rec.gamma_next_covered.clone(),
            delta: rec.delta(),
            ratio_float: ratio.to_f64().unwrap_or(f64::NAN),
            ratio,
        }
    }
}

/// Configured counting engine.
#[derive(Clone, Copy, Debug)]
pub struct Counter {
    pub ceilings: Ceilings,
    pub exec: Exec,
    /// Number of leading decisions fixed per DFS shard (`2^depth` shards).
    pub partition_depth: usize,
}

impl Default for Counter {
    fn default() -> Self {
        Self {
            ceilings: Ceilings::default(),
            exec: Exec::default(),
            partition_depth: 8,
        }
    }
}

fn check_ceiling(what: &'static str, n: usize, ceiling: usize) -> Result<()> {
    if n > ceiling {
        return Err(Error::LimitExceeded { what, n, ceiling });
    }
    Ok(())
}

#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
struct Tally {
    gamma: u128,
    next_covered: u128,
}

impl Tally {
    fn merge(self, other: Tally) -> Tally {
        Tally {
            gamma: self.gamma + other.gamma,
            next_covered: self.next_covered + other.next_covered,
        }
    }
}

const BRUTE_BLOCK_BITS: u32 = 14;

impl Counter {
    pub fn new(ceilings: Ceilings, exec: Exec) -> Self {
        Self {
            ceilings,
            exec,
            ..Self::default()
        }
    }

    pub fn count(&self, n: usize, method: Method) -> Result<CountRecord> {
        match method {
            Method::Brute => self.brute(n),
            Method::Dfs => self.dfs(n),
        }
    }

    /// Exhaustive count over all `2^(n+1)` subsets.
    pub fn brute(&self, n: usize) -> Result<CountRecord> {
        check_ceiling("brute-force count", n, self.ceilings.brute.min(WORD_MAX_N))?;
        let start = Instant::now();
        let targets = low_mask128(n);
        let next_bit = 1u128 << (n + 1);
        let total_bits = (n + 1) as u32;
        let block_bits = total_bits.min(BRUTE_BLOCK_BITS);
        let blocks = 1u64 << (total_bits - block_bits);
        let tally = self.exec.map_reduce(
            0..blocks,
            Tally::default,
            |block| {
                let lo = block << block_bits;
                let mut t = Tally::default();
                for x in lo..lo + (1u64 << block_bits) {
                    let sums = sumset_word(x);
                    if sums & targets == targets {
                        t.gamma += 1;
                        if sums & next_bit != 0 {
                            t.next_covered += 1;
                        }
                    }
                }
                t
            },
            Tally::merge,
        );
        Ok(self.record(n, tally, Method::Brute, start))
    }

    /// Pruned depth-first count, sharded by `self.partition_depth`.
    pub fn dfs(&self, n: usize) -> Result<CountRecord> {
        self.dfs_with_depth(n, self.partition_depth)
    }

    pub fn dfs_with_depth(&self, n: usize, partition_depth: usize) -> Result<CountRecord> {
        check_ceiling("dfs count", n, self.ceilings.dfs.min(WORD_MAX_N))?;
        let start = Instant::now();
        let search = Search::new(n);
        let depth = partition_depth.min(n + 1);
        let tally = self.exec.map_reduce(
            0..1u64 << depth,
            Tally::default,
            |shard| search.count_shard(shard, depth),
            Tally::merge,
        );
        Ok(self.record(n, tally, Method::Dfs, start))
    }

    fn record(&self, n: usize, tally: Tally, method: Method, start: Instant) -> CountRecord {
        CountRecord {
            n,
            gamma: BigUint::from(tally.gamma),
            gamma_next_covered: BigUint::from(tally.next_covered),
            method,
            elapsed: start.elapsed().as_secs_f64(),
        }
    }

    /// Streams every base of `[n]₀` in increasing order of its bit mask
    /// (bit `i` weighted `2^i`) and returns how many were delivered.
    pub fn enumerate<F: FnMut(&SubsetMask)>(&self, n: usize, mut sink: F) -> Result<u64> {
        check_ceiling("enumeration", n, self.ceilings.enumeration.min(WORD_MAX_N))?;
        let targets = low_mask128(n);
        let mut delivered = 0;
        for x in 0..1u64 << (n + 1) {
            if sumset_word(x) & targets == targets {
                sink(&SubsetMask::from_word(n, x));
                delivered += 1;
            }
        }
        Ok(delivered)
    }

    /// Parallel enumeration; the returned order is the same as [`Self::enumerate`].
    pub fn enumerate_all(&self, n: usize) -> Result<Vec<SubsetMask>> {
        check_ceiling("enumeration", n, self.ceilings.enumeration.min(WORD_MAX_N))?;
        let targets = low_mask128(n);
        let total_bits = (n + 1) as u32;
        let block_bits = total_bits.min(BRUTE_BLOCK_BITS);
        let blocks = 1u64 << (total_bits - block_bits);
        let chunks: Vec<(u64, Vec<u64>)> = self.exec.map_reduce(
            0..blocks,
            Vec::new,
            |block| {
                let lo = block << block_bits;
                let found = (lo..lo + (1u64 << block_bits))
                    .filter(|&x| sumset_word(x) & targets == targets)
                    .collect();
                vec![(block, found)]
            },
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        );
        let mut chunks = chunks;
        chunks.sort_unstable_by_key(|(block, _)| *block);
        Ok(chunks
            .into_iter()
            .flat_map(|(_, xs)| xs)
            .map(|x| SubsetMask::from_word(n, x))
            .collect())
    }

    /// Exhaustive count for `n ≤ min(16, brute ceiling)`, DFS above.
    pub fn count_auto(&self, n: usize) -> Result<CountRecord> {
        if n <= self.ceilings.brute.min(16) {
            self.brute(n)
        } else {
            self.dfs(n)
        }
    }

    /// Checks `|Γ(n+1)| = |Γ(n)| + |{X ∈ Γ(n) : n+1 ∈ X+X}|` exactly.
    pub fn verify_recurrence(&self, n: usize) -> Result<bool> {
        let here = self.count_auto(n)?;
        let next = self.count_auto(n + 1)?;
        Ok(recurrence_holds(&here, &next))
    }

    pub fn delta(&self, n: usize) -> Result<BigRational> {
        Ok(self.count_auto(n)?.delta())
    }

    /// Rows for `n = 0..=n_max`.
    pub fn growth_table(&self, n_max: usize) -> Result<Vec<GrowthRow>> {
        Ok(self
            .records(n_max)?
            .iter()
            .map(GrowthRow::from)
            .collect())
    }

    /// Count records for `n = 0..=n_max`.
    pub fn records(&self, n_max: usize) -> Result<Vec<CountRecord>> {
        (0..=n_max).map(|n| self.count_auto(n)).collect()
    }
}

/// `next.gamma == here.gamma + here.gamma_next_covered` for consecutive records.
pub fn recurrence_holds(here: &CountRecord, next: &CountRecord) -> bool {
    next.n == here.n + 1 && next.gamma == &here.gamma + &here.gamma_next_covered
}

/// Problems found in a growth table: broken recurrence links, `δ ∉ [0,1]`,
/// or an increase of `r(n)`.
pub fn growth_table_issues(rows: &[GrowthRow]) -> Vec<String> {
    let mut issues = Vec::new();
    for row in rows {
        if row.delta < BigRational::zero() || row.delta > BigRational::one() {
            issues.push(format!("n = {}: delta {} outside [0,1]", row.n, row.delta));
        }
    }
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if b.n != a.n + 1 {
            issues.push(format!("rows {} and {} are not consecutive", a.n, b.n));
            continue;
        }
        if b.gamma != &a.gamma + &a.gamma_next_covered {
            issues.push(format!("recurrence broken between n = {} and n = {}", a.n, b.n));
        }
        if b.ratio > a.ratio {
            issues.push(format!("ratio increases from n = {} to n = {}", a.n, b.n));
        }
    }
    issues
}

pub fn count_brute(n: usize) -> Result<CountRecord> {
    Counter::default().brute(n)
}

pub fn count_dfs(n: usize, partition_depth: usize) -> Result<CountRecord> {
    Counter::default().dfs_with_depth(n, partition_depth)
}

pub fn enumerate<F: FnMut(&SubsetMask)>(n: usize, sink: F) -> Result<u64> {
    Counter::default().enumerate(n, sink)
}

// Per-target live-representation counters are stored bit-sliced: plane `p`
// holds bit `p` of every target's counter. A target `k ≤ 62` has at most 32
// representations `{i, k - i}`, so six planes suffice.
const PLANES: usize = 6;

#[derive(Clone, Copy, Debug)]
struct Node {
    /// Decided members.
    members: u64,
    /// Sums of decided members, restricted to `[n+1]₀`.
    covered: u64,
    /// Live representations per target `k ∈ [n]₀`: those with no component
    /// decided out.
    alive: [u64; PLANES],
}

struct Search {
    n: usize,
    targets: u64,
    cover_mask: u64,
    next_bit: u64,
}

impl Search {
    fn new(n: usize) -> Self {
        assert!(n <= WORD_MAX_N);
        let targets = (1u64 << (n + 1)) - 1;
        Self {
            n,
            targets,
            cover_mask: (targets << 1) | 1,
            next_bit: 1 << (n + 1),
        }
    }

    fn root(&self) -> Node {
        let mut alive = [0u64; PLANES];
        for k in 0..=self.n {
            let reps = k / 2 + 1;
            for (p, plane) in alive.iter_mut().enumerate() {
                if (reps >> p) & 1 == 1 {
                    *plane |= 1 << k;
                }
            }
        }
        Node {
            members: 0,
            covered: 0,
            alive,
        }
    }

    /// Decides element `j` (all smaller elements are decided). `None` if a
    /// target is left with no live representation.
    #[inline]
    fn decide(&self, node: &Node, j: usize, take: bool) -> Option<Node> {
        let mut child = *node;
        if take {
            child.members |= 1 << j;
            child.covered |= (child.members << j) & self.cover_mask;
            return Some(child);
        }
        // Representations {j, c} still live before this decision: c is a
        // member below j, or c ≥ j is undecided.
        let possible = node.members | (self.targets & !((1u64 << j) - 1));
        let mut borrow = (possible << j) & self.targets;
        let mut nonzero = 0u64;
        for plane in child.alive.iter_mut() {
            let old = *plane;
            *plane = old ^ borrow;
            borrow &= !old;
            nonzero |= *plane;
        }
        debug_assert_eq!(borrow, 0, "live-representation counter underflow");
        if nonzero & self.targets != self.targets {
            return None;
        }
        Some(child)
    }

    /// Counts extensions of a node whose decided members already cover `[n]₀`;
    /// elements `next..=n` are free.
    #[inline]
    fn tally_covered(&self, node: &Node, next: usize) -> Tally {
        let free = (self.n + 1 - next) as u32;
        let all = 1u128 << free;
        if node.covered & self.next_bit != 0 {
            return Tally {
                gamma: all,
                next_covered: all,
            };
        }
        // n + 1 = i + (n + 1 - i) with 1 ≤ i ≤ n; count the free assignments
        // that leave every such pair incomplete. A pair of two undecided
        // elements allows 3 of 4 choices, a pair with one decided-out
        // element and one undecided allows 2, everything else allows 1.
        let undecided = self.targets & !((1u64 << next) - 1);
        let decided_out = !node.members & ((1u64 << next) - 1);
        let reflect = |s: u64| s.reverse_bits() >> (WORD_MAX_N - self.n);
        let refl_undecided = reflect(undecided);
        let both = undecided & refl_undecided;
        let mid = if (self.n + 1) % 2 == 0 {
            both & (1 << ((self.n + 1) / 2))
        } else {
            0
        };
        let pairs_free = (both.count_ones() - mid.count_ones()) / 2;
        let pairs_half = (decided_out & refl_undecided).count_ones();
        let miss = 3u128.pow(pairs_free) << pairs_half;
        Tally {
            gamma: all,
            next_covered: all - miss,
        }
    }

    fn search(&self, node: Node, next: usize, acc: &mut Tally) {
        if node.covered & self.targets == self.targets {
            *acc = acc.merge(self.tally_covered(&node, next));
            return;
        }
        if next > self.n {
            return;
        }
        if let Some(child) = self.decide(&node, next, false) {
            self.search(child, next + 1, acc);
        }
        if let Some(child) = self.decide(&node, next, true) {
            self.search(child, next + 1, acc);
        }
    }

    /// Counts the subtree where element `i < depth` is a member iff bit `i`
    /// of `shard` is set.
    fn count_shard(&self, shard: u64, depth: usize) -> Tally {
        let mut node = self.root();
        for j in 0..depth {
            match self.decide(&node, j, (shard >> j) & 1 == 1) {
                Some(child) => node = child,
                None => return Tally::default(),
            }
        }
        let mut acc = Tally::default();
        self.search(node, depth, &mut acc);
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumset::{is_two_base, sumset};

    fn gammas(rec: &CountRecord) -> (u64, u64) {
        (
            rec.gamma.to_u64().unwrap(),
            rec.gamma_next_covered.to_u64().unwrap(),
        )
    }

    /// Counts by building every subset and calling the general kernels.
    fn oracle(n: usize) -> (u64, u64) {
        let mut g = 0;
        let mut next = 0;
        for x in 0..1u64 << (n + 1) {
            let s = SubsetMask::from_word(n, x);
            if is_two_base(&s) {
                g += 1;
                if sumset(&s).contains(n + 1) {
                    next += 1;
                }
            }
        }
        (g, next)
    }

    #[test]
    fn brute_small_values() {
        assert_eq!(gammas(&count_brute(0).unwrap()), (1, 0));
        assert_eq!(gammas(&count_brute(2).unwrap()), (2, 1));
        assert_eq!(count_brute(4).unwrap().gamma, BigUint::from(6u32));
        assert_eq!(count_brute(3).unwrap().gamma, BigUint::from(3u32));
    }

    #[test]
    fn brute_and_dfs_match_general_oracle() {
        for n in 0..=12 {
            let expected = oracle(n);
            assert_eq!(gammas(&count_brute(n).unwrap()), expected, "brute n={n}");
            for depth in [0, 1, 3, 8] {
                assert_eq!(gammas(&count_dfs(n, depth).unwrap()), expected, "dfs n={n} d={depth}");
            }
        }
    }

    #[test]
    fn brute_ceiling_is_enforced_and_overridable() {
        let c = Counter {
            ceilings: Ceilings {
                brute: 5,
                ..Ceilings::default()
            },
            ..Counter::default()
        };
        assert!(matches!(c.brute(6), Err(Error::LimitExceeded { .. })));
        assert!(c.brute(5).is_ok());
        assert!(matches!(
            Counter::default().dfs(WORD_MAX_N + 1),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn enumerate_examples() {
        let list = |n| {
            let mut out = Vec::new();
            enumerate(n, |s| out.push(s.to_string())).unwrap();
            out
        };
        assert_eq!(list(0), vec!["{0}"]);
        assert_eq!(list(1), vec!["{0,1}"]);
        assert_eq!(list(2), vec!["{0,1}", "{0,1,2}"]);
        let four = list(4);
        assert_eq!(four.len(), 6);
        for b in ["{0,1,2}", "{0,1,3}", "{0,1,2,3}", "{0,1,2,4}", "{0,1,3,4}", "{0,1,2,3,4}"] {
            assert!(four.iter().any(|s| s == b), "{b} missing");
        }
    }

    #[test]
    fn parallel_enumeration_matches_streaming_order() {
        let counter = Counter::default();
        for n in [0, 5, 15, 17] {
            let mut streamed = Vec::new();
            counter.enumerate(n, |s| streamed.push(s.clone())).unwrap();
            assert_eq!(counter.enumerate_all(n).unwrap(), streamed);
        }
    }

    #[test]
    fn recurrence_and_delta_examples() {
        let c = Counter::default();
        assert!(c.verify_recurrence(0).unwrap());
        assert!(c.verify_recurrence(2).unwrap());
        assert!(c.verify_recurrence(10).unwrap());
        assert_eq!(c.delta(2).unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(c.delta(0).unwrap(), BigRational::zero());
        assert_eq!(c.delta(1).unwrap(), BigRational::one());
    }

    #[test]
    fn growth_table_small() {
        let rows = Counter::default().growth_table(4).unwrap();
        let g: Vec<u64> = rows.iter().map(|r| r.gamma.to_u64().unwrap()).collect();
        assert_eq!(g, vec![1, 1, 2, 3, 6]);
        assert_eq!(rows[4].ratio, BigRational::new(3.into(), 16.into()));
        assert!(growth_table_issues(&rows).is_empty());
    }

    #[test]
    fn records_are_consistent_and_meet_first_lower_bound() {
        for rec in Counter::default().records(20).unwrap() {
            assert!(rec.is_consistent(), "{rec:?}");
            assert!(rec.meets_first_lower_bound(), "{rec:?}");
        }
    }

    #[test]
    fn issues_are_reported() {
        let mut rows = Counter::default().growth_table(5).unwrap();
        rows[3].gamma += 1u32;
        assert!(!growth_table_issues(&rows).is_empty());
    }

    #[test]
    fn method_round_trips_through_text() {
        for m in [Method::Brute, Method::Dfs] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("gray".parse::<Method>().is_err());
    }
}
