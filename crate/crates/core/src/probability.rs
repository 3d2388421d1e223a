//! Exact and sampled probabilities for a uniformly random `X ⊆ [n]₀`.
//!
//! All events here are over independent fair bits, so exact probabilities
//! are dyadic and are kept as exact integers throughout.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::bounds::{le_sqrt, pow_three_quarters};
use crate::count::{Counter, WORD_MAX_N};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::sumset::{self, low_mask128, sumset_word, SubsetMask, WORD_BITS};

/// Default `Γ′` threshold: subsets leaving at most this many targets uncovered.
pub const GAMMA_PRIME_THRESHOLD: usize = 20;

/// Upper bound on the expected number of uncovered targets.
pub const EXPECTED_UNCOVERED_LIMIT: u32 = 10;

/// An exact probability with a power-of-two denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactProb {
    pub numerator: BigUint,
    pub denominator: BigUint,
}

impl ExactProb {
    /// `numerator / 2^log2_den`, reduced.
    fn dyadic(numerator: BigUint, log2_den: u64) -> Self {
        let shift = numerator.trailing_zeros().unwrap_or(log2_den).min(log2_den);
        Self {
            numerator: numerator >> shift,
            denominator: BigUint::one() << (log2_den - shift),
        }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl std::fmt::Display for ExactProb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Unordered pairs `{i, k - i}` with `i < k - i`, both in `[n]₀`, and whether
/// the midpoint `k / 2` lies in `[n]₀`.
fn representations(n: usize, k: usize) -> (u64, bool) {
    let lo = k.saturating_sub(n);
    let hi = k.div_ceil(2);
    let pairs = hi.saturating_sub(lo) as u64;
    let mid = k % 2 == 0 && k / 2 <= n;
    (pairs, mid)
}

/// `P[k ∉ X + X] = (3/4)^p · (1/2)^m` for uniformly random `X ⊆ [n]₀`,
/// where `p` counts the pairs `{i, k-i}` inside `[n]₀` and `m` is 1 when
/// the midpoint `k/2` is in `[n]₀`. Each pair and the midpoint are disjoint
/// sets of fair coins.
pub fn exact_prob_not_generated(n: usize, k: usize) -> Result<ExactProb> {
    if k > n + 1 {
        return Err(Error::OutOfRange { k, max: n + 1 });
    }
    let (pairs, mid) = representations(n, k);
    Ok(ExactProb::dyadic(
        BigUint::from(3u32).pow(pairs as u32),
        2 * pairs + mid as u64,
    ))
}

/// `(3/4)^(k/2 - 1)` squared, i.e. `(3/4)^(k-2)`.
pub fn notgen_bound_squared(k: usize) -> BigRational {
    pow_three_quarters(k as i64 - 2)
}

#[derive(Clone, Debug)]
pub struct NotGenCheck {
    pub k: usize,
    pub exact: ExactProb,
    /// Square of `(3/4)^(k/2 - 1)`.
    pub bound_squared: BigRational,
    pub ok: bool,
}

impl NotGenCheck {
    pub fn bound_f64(&self) -> f64 {
        0.75f64.powf(self.k as f64 / 2.0 - 1.0)
    }
}

/// Compares the exact miss probability with `(3/4)^(k/2 - 1)` for every
/// `k ∈ [n+1]₀`, exactly, via squares.
pub fn check_lemma_notgen(n: usize) -> Vec<NotGenCheck> {
    (0..=n + 1)
        .map(|k| {
            let exact = exact_prob_not_generated(n, k).expect("k within range");
            let bound_squared = notgen_bound_squared(k);
            let ok = le_sqrt(&exact.to_rational(), &bound_squared);
            NotGenCheck {
                k,
                exact,
                bound_squared,
                ok,
            }
        })
        .collect()
}

/// `num / 2^exp` accumulator.
#[derive(Clone, Debug, Default)]
struct Dyadic {
    num: BigUint,
    exp: u64,
}

impl Dyadic {
    fn add(&mut self, p: &ExactProb) {
        let exp = p.denominator.bits() - 1;
        if exp > self.exp {
            self.num <<= exp - self.exp;
            self.exp = exp;
        }
        self.num += &p.numerator << (self.exp - exp);
    }

    fn le_integer(&self, limit: u32) -> bool {
        self.num <= BigUint::from(limit) << self.exp
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.num.clone()),
            BigInt::one() << self.exp,
        )
    }
}

/// `E|[n]₀ \ (X + X)| = Σ_{k ≤ n} P[k ∉ X + X]`, exactly.
pub fn exact_expected_uncovered(n: usize) -> BigRational {
    let mut acc = Dyadic::default();
    for k in 0..=n {
        acc.add(&exact_prob_not_generated(n, k).expect("k within range"));
    }
    acc.to_rational()
}

/// Checks `E|[n]₀ \ (X + X)| ≤ limit` for every `n ≤ n_max` and returns
/// the first `n` that fails, if any.
///
/// For `k ≤ n` every representation of `k` lies inside `[n]₀`, so the
/// expectation for `n` is the expectation for `n - 1` plus the term for
/// `k = n`, and a single running sum covers the whole range.
pub fn first_expected_uncovered_violation(n_max: usize, limit: u32) -> Option<usize> {
    let mut acc = Dyadic::default();
    for n in 0..=n_max {
        acc.add(&exact_prob_not_generated(n, n).expect("k within range"));
        if !acc.le_integer(limit) {
            return Some(n);
        }
    }
    None
}

/// The closed-form ceiling `(4/3) / (1 - √(3/4))` on the expectation.
pub fn expected_uncovered_ceiling() -> f64 {
    (4.0 / 3.0) / (1.0 - 0.75f64.sqrt())
}

/// A uniformly random subset of `[n]₀`, determined entirely by
/// `(seed, index, n)`.
///
/// Each sample is the start of an independent ChaCha8 stream: the key holds
/// `seed` (little endian, zero padded) and the stream id is `index`.
pub fn mc_sample_subset(n: usize, seed: u64, index: u64) -> SubsetMask {
    let mut rng = sample_rng(seed, index);
    let words = (n + 1).div_ceil(WORD_BITS);
    let mut bits = SubsetMask::empty(n);
    for i in 0..words {
        let w = rng.next_u64();
        for b in 0..WORD_BITS {
            let e = i * WORD_BITS + b;
            if e > n {
                break;
            }
            if (w >> b) & 1 == 1 {
                bits.insert(e);
            }
        }
    }
    bits
}

fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}

/// Uncovered targets in `[n+1]₀` of sample `index`, as a list of positions.
fn sample_misses(n: usize, seed: u64, index: u64, out: &mut Vec<usize>) {
    out.clear();
    if n < WORD_MAX_N {
        let x = sample_rng(seed, index).next_u64() & ((1u64 << (n + 1)) - 1);
        let mut missing = !sumset_word(x) & low_mask128(n + 1);
        while missing != 0 {
            out.push(missing.trailing_zeros() as usize);
            missing &= missing - 1;
        }
    } else {
        let x = mc_sample_subset(n, seed, index);
        let covered = sumset::sumset_prefix(&x, n + 1);
        for k in 0..=n + 1 {
            if (covered[k / WORD_BITS] >> (k % WORD_BITS)) & 1 == 0 {
                out.push(k);
            }
        }
    }
}

/// Monte Carlo accumulator for `Y = |[n]₀ \ (X + X)|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McStats {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `Σ Y`
    pub sum: u128,
    /// `Σ Y²`
    pub sum_sq: u128,
    /// Samples with `k ∉ X + X`, for `k ∈ [n+1]₀`.
    pub per_k_misses: Vec<u64>,
}

impl McStats {
    fn empty(n: usize, seed: u64) -> Self {
        Self {
            n,
            samples: 0,
            seed,
            sum: 0,
            sum_sq: 0,
            per_k_misses: vec![0; n + 2],
        }
    }

    fn merge(mut self, other: McStats) -> McStats {
        self.samples += other.samples;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (a, b) in self.per_k_misses.iter_mut().zip(&other.per_k_misses) {
            *a += b;
        }
        self
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.samples as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.samples < 2 {
            return 0.0;
        }
        let s = self.samples as f64;
        let mean = self.mean();
        ((self.sum_sq as f64 - s * mean * mean) / (s - 1.0)).max(0.0)
    }

    pub fn stderr(&self) -> f64 {
        (self.variance() / self.samples as f64).sqrt()
    }

    pub fn miss_rate(&self, k: usize) -> f64 {
        self.per_k_misses[k] as f64 / self.samples as f64
    }

    /// Standard error of the miss rate at `k`, from the binomial variance.
    pub fn miss_rate_stderr(&self, k: usize) -> f64 {
        let p = self.miss_rate(k);
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

const MC_BLOCK: u64 = 1024;

/// Samples `X` for indices `0..samples` and accumulates uncovered counts.
pub fn mc_uncovered(n: usize, samples: u64, seed: u64, exec: Exec) -> Result<McStats> {
    if samples == 0 {
        return Err(Error::BadArgument("samples must be at least 1".into()));
    }
    let blocks = samples.div_ceil(MC_BLOCK);
    Ok(exec.map_reduce(
        0..blocks,
        || McStats::empty(n, seed),
        |block| {
            let mut stats = McStats::empty(n, seed);
            let mut misses = Vec::new();
            let lo = block * MC_BLOCK;
            for index in lo..(lo + MC_BLOCK).min(samples) {
                sample_misses(n, seed, index, &mut misses);
                let y = misses.iter().filter(|&&k| k <= n).count() as u128;
                stats.samples += 1;
                stats.sum += y;
                stats.sum_sq += y * y;
                for &k in &misses {
                    stats.per_k_misses[k] += 1;
                }
            }
            stats
        },
        McStats::merge,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerKEntry {
    pub k: usize,
    pub miss_rate: f64,
    pub exact: f64,
    pub bound: f64,
}

/// JSON-facing Monte Carlo summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    pub per_k: Vec<PerKEntry>,
}

impl McReport {
    /// Builds the report; `ks` selects which per-target rows to include.
    pub fn new(stats: &McStats, ks: impl IntoIterator<Item = usize>) -> Result<Self> {
        let per_k = ks
            .into_iter()
            .map(|k| {
                let exact = exact_prob_not_generated(stats.n, k)?;
                Ok(PerKEntry {
                    k,
                    miss_rate: stats.miss_rate(k),
                    exact: exact.to_f64(),
                    bound: 0.75f64.powf(k as f64 / 2.0 - 1.0),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: stats.n,
            samples: stats.samples,
            seed: stats.seed,
            mean: stats.mean(),
            stderr: stats.stderr(),
            per_k,
        })
    }
}

fn uncovered_word(x: u64, targets: u128) -> u32 {
    (!sumset_word(x) & targets).count_ones()
}

/// `|Γ′(n)|`: subsets of `[n]₀` with at most `threshold` uncovered targets,
/// by exhaustive iteration.
pub fn gamma_prime_count(counter: &Counter, n: usize, threshold: usize) -> Result<BigUint> {
    let ceiling = counter.ceilings.brute.min(WORD_MAX_N);
    if n > ceiling {
        return Err(Error::LimitExceeded {
            what: "exact gamma-prime count",
            n,
            ceiling,
        });
    }
    let targets = low_mask128(n);
    let total_bits = (n + 1) as u32;
    let block_bits = total_bits.min(14);
    let count = counter.exec.map_reduce(
        0..1u64 << (total_bits - block_bits),
        || 0u64,
        |block| {
            let lo = block << block_bits;
            (lo..lo + (1u64 << block_bits))
                .filter(|&x| uncovered_word(x, targets) as usize <= threshold)
                .count() as u64
        },
        |a, b| a + b,
    );
    Ok(BigUint::from(count))
}

/// Sampled estimate of the fraction of subsets in `Γ′(n)`; multiply by
/// `2^(n+1)` for a count estimate.
pub fn gamma_prime_fraction_estimate(
    n: usize,
    threshold: usize,
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::BadArgument("samples must be at least 1".into()));
    }
    let hits = exec.map_reduce(
        0..samples.div_ceil(MC_BLOCK),
        || 0u64,
        |block| {
            let mut misses = Vec::new();
            let lo = block * MC_BLOCK;
            (lo..(lo + MC_BLOCK).min(samples))
                .filter(|&index| {
                    sample_misses(n, seed, index, &mut misses);
                    misses.iter().filter(|&&k| k <= n).count() <= threshold
                })
                .count() as u64
        },
        |a, b| a + b,
    );
    Ok(hits as f64 / samples as f64)
}

/// All `X ⊆ B` with `complete(X) = B` and at most `threshold` uncovered
/// targets, in decreasing order of bit mask (so `B` itself comes first).
pub fn completion_preimages(
    counter: &Counter,
    base: &SubsetMask,
    threshold: usize,
) -> Result<Vec<SubsetMask>> {
    let n = base.n();
    let ceiling = counter.ceilings.enumeration.min(WORD_MAX_N);
    if n > ceiling {
        return Err(Error::LimitExceeded {
            what: "completion preimages",
            n,
            ceiling,
        });
    }
    let b = base.as_word().expect("n below word width");
    let targets = low_mask128(n);
    let sums = sumset_word(b);
    if sums & targets != targets {
        return Err(Error::NotABase(base.to_string(), n));
    }
    let mut out = Vec::new();
    let mut sub = b;
    loop {
        let missing = (!sumset_word(sub) & targets) as u64;
        if sub | missing == b && missing.count_ones() as usize <= threshold {
            out.push(SubsetMask::from_word(n, sub));
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & b;
    }
    Ok(out)
}

/// `count ≤ (n+1)^20`, exactly.
pub fn within_preimage_bound(n: usize, count: usize) -> bool {
    BigUint::from(count) <= BigUint::from(n + 1).pow(GAMMA_PRIME_THRESHOLD as u32)
}

/// `|Γ′(n)| ≥ 2^n`.
pub fn meets_gamma_prime_bound(n: usize, gamma_prime: &BigUint) -> bool {
    gamma_prime >= &(BigUint::one() << n)
}

/// Exhaustive miss counts `#{X ⊆ [n]₀ : k ∉ X + X}` for `k ∈ [n+1]₀`;
/// brute-force reference for small `n`.
pub fn exhaustive_miss_counts(n: usize) -> Vec<u64> {
    assert!(n < WORD_MAX_N);
    let mut counts = vec![0u64; n + 2];
    let targets = low_mask128(n + 1);
    for x in 0..1u64 << (n + 1) {
        let mut missing = !sumset_word(x) & targets;
        while missing != 0 {
            counts[missing.trailing_zeros() as usize] += 1;
            missing &= missing - 1;
        }
    }
    counts
}

impl Zero for ExactProb {
    fn zero() -> Self {
        Self {
            numerator: BigUint::zero(),
            denominator: BigUint::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }
}

impl std::ops::Add for ExactProb {
    type Output = ExactProb;

    fn add(self, rhs: ExactProb) -> ExactProb {
        let mut acc = Dyadic::default();
        acc.add(&self);
        acc.add(&rhs);
        ExactProb::dyadic(acc.num, acc.exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sumset::uncovered;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn exact_prob_examples() {
        for n in [2, 3, 10] {
            assert_eq!(exact_prob_not_generated(n, 2).unwrap().to_rational(), q(3, 8));
        }
        assert_eq!(exact_prob_not_generated(2, 3).unwrap().to_rational(), q(3, 4));
        for n in [0, 1, 7] {
            assert_eq!(exact_prob_not_generated(n, 0).unwrap().to_rational(), q(1, 2));
        }
        assert!(matches!(
            exact_prob_not_generated(3, 5),
            Err(Error::OutOfRange { k: 5, max: 4 })
        ));
    }

    #[test]
    fn exact_prob_has_power_of_two_denominator() {
        for n in 0..30 {
            for k in 0..=n + 1 {
                let p = exact_prob_not_generated(n, k).unwrap();
                assert_eq!(p.denominator.count_ones(), 1);
                assert!(p.numerator <= p.denominator);
            }
        }
    }

    #[test]
    fn lemma_notgen_examples() {
        let checks = check_lemma_notgen(4);
        assert!(checks.iter().all(|c| c.ok));
        assert_eq!(checks[2].exact.to_rational(), q(3, 8));
        assert_eq!(checks[2].bound_squared, q(1, 1));
        assert_eq!(checks[0].bound_squared, q(16, 9));
        assert_eq!(checks[4].exact.to_rational(), q(9, 32));
    }

    #[test]
    fn expected_uncovered_examples() {
        assert_eq!(exact_expected_uncovered(2), q(13, 8));
        assert_eq!(exact_expected_uncovered(0), q(1, 2));
        let e200 = exact_expected_uncovered(200);
        assert!(e200 > q(499, 100) && e200 < q(501, 100));
    }

    #[test]
    fn running_sum_matches_direct_sum() {
        let limit_hit = first_expected_uncovered_violation(300, 5);
        let direct = (0..=300).find(|&n| exact_expected_uncovered(n) > q(5, 1));
        assert_eq!(limit_hit, direct);
        assert_eq!(first_expected_uncovered_violation(300, 10), None);
    }

    #[test]
    fn expected_uncovered_matches_exhaustive_average() {
        for n in 0..=12 {
            let total: usize = (0..1u64 << (n + 1))
                .map(|x| uncovered(&SubsetMask::from_word(n, x)).len())
                .sum();
            let avg = BigRational::new(BigInt::from(total), BigInt::one() << (n + 1));
            assert_eq!(exact_expected_uncovered(n), avg, "n = {n}");
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = mc_sample_subset(7, 1, 0);
        assert_eq!(a, mc_sample_subset(7, 1, 0));
        assert_ne!(mc_sample_subset(40, 1, 0), mc_sample_subset(40, 1, 1));
        let wide = mc_sample_subset(300, 9, 4);
        assert_eq!(wide, mc_sample_subset(300, 9, 4));
        assert_eq!(wide.n(), 300);
    }

    #[test]
    fn word_fast_path_matches_general_sampler() {
        for index in 0..50 {
            let mut fast = Vec::new();
            sample_misses(20, 3, index, &mut fast);
            let x = mc_sample_subset(20, 3, index);
            let sums = crate::sumset::sumset(&x);
            let slow: Vec<usize> = (0..=21).filter(|&k| !sums.contains(k)).collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn mc_rejects_zero_samples() {
        assert!(matches!(
            mc_uncovered(3, 0, 1, Exec::Sequential),
            Err(Error::BadArgument(_))
        ));
    }

    #[test]
    fn mc_n0_is_bernoulli() {
        let stats = mc_uncovered(0, 100, 5, Exec::Sequential).unwrap();
        assert!(stats.sum <= 100);
        assert_eq!(stats.per_k_misses[0] as u128, stats.sum);
    }

    #[test]
    fn mc_merge_is_partition_independent() {
        let seq = mc_uncovered(70, 5000, 11, Exec::Sequential).unwrap();
        let par = mc_uncovered(70, 5000, 11, Exec::Parallel { threads: 3 }).unwrap();
        assert_eq!(seq, par);
    }

    #[test]
    fn gamma_prime_small() {
        let c = Counter::default();
        assert_eq!(gamma_prime_count(&c, 10, 20).unwrap(), BigUint::from(1u32 << 11));
        let n = 14;
        let exhaustive = (0..1u64 << (n + 1))
            .filter(|&x| uncovered(&SubsetMask::from_word(n, x)).len() <= 3)
            .count();
        assert_eq!(gamma_prime_count(&c, n, 3).unwrap(), BigUint::from(exhaustive));
    }

    #[test]
    fn preimage_examples() {
        let c = Counter::default();
        let b = SubsetMask::parse(2, "{0,1}").unwrap();
        let pre: Vec<String> = completion_preimages(&c, &b, 20)
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(pre, vec!["{0,1}", "{1}"]);
        let b0 = SubsetMask::parse(0, "{0}").unwrap();
        let pre0: Vec<String> = completion_preimages(&c, &b0, 20)
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(pre0, vec!["{0}", "{}"]);
        let not_base = SubsetMask::parse(6, "{0,1,3}").unwrap();
        assert!(matches!(
            completion_preimages(&c, &not_base, 20),
            Err(Error::NotABase(_, 6))
        ));
    }

    #[test]
    fn exact_prob_addition() {
        let a = exact_prob_not_generated(5, 2).unwrap();
        let b = exact_prob_not_generated(5, 0).unwrap();
        assert_eq!((a + b).to_rational(), q(7, 8));
        assert!(ExactProb::zero().is_zero());
    }
}
