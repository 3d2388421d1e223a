//! Subsets of `[n]₀ = {0, 1, ..., n}` as word-packed bit vectors, and the
//! shift-OR sumset kernel.

use std::fmt;

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A subset of `[n]₀`. Bit `i` is set iff `i` is a member.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    n: usize,
    words: Vec<u64>,
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            words: vec![0; words_for(n + 1)],
        }
    }

    /// The full interval `[n]₀`.
    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(n: usize, elements: I) -> Result<Self> {
        let mut s = Self::empty(n);
        for e in elements {
            if e > n {
                return Err(Error::OutOfRange { k: e, max: n });
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// Builds a mask from the low `n + 1` bits of `bits`; requires `n < 64`.
    pub fn from_word(n: usize, bits: u64) -> Self {
        assert!(n < WORD_BITS, "single-word mask needs n < 64, got {n}");
        let mut s = Self { n, words: vec![bits] };
        s.trim();
        s
    }

    /// The single backing word, if `n < 64`.
    pub fn as_word(&self) -> Option<u64> {
        (self.n < WORD_BITS).then(|| self.words[0])
    }

    fn trim(&mut self) {
        let used = (self.n + 1) % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn contains(&self, i: usize) -> bool {
        i <= self.n && (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i <= self.n, "element {i} outside [0, {}]", self.n);
        self.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
    }

    pub fn remove(&mut self, i: usize) {
        if i <= self.n {
            self.words[i / WORD_BITS] &= !(1 << (i % WORD_BITS));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn min_element(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n, "subset test across different universes");
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n, "union across different universes");
        Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n, "difference across different universes");
        Self {
            n: self.n,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// Parses the `{0,1,3}` rendering produced by `Display`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let inner = text
            .trim()
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| Error::BadArgument(format!("expected {{...}}, got {text:?}")))?;
        let mut elements = Vec::new();
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let e = part
                .parse::<usize>()
                .map_err(|_| Error::BadArgument(format!("bad element {part:?}")))?;
            elements.push(e);
        }
        Self::from_elements(n, elements)
    }
}

impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (idx, e) in self.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubsetMask(n={}, {})", self.n, self)
    }
}

/// `X + X` as a bit vector over `[2n]₀`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SumsetMask {
    n: usize,
    words: Vec<u64>,
}

impl SumsetMask {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: usize) -> bool {
        s <= 2 * self.n && (self.words[s / WORD_BITS] >> (s % WORD_BITS)) & 1 == 1
    }

    pub fn iter(&self) -> Ones<'_> {
        Ones::new(&self.words)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        debug_assert_eq!(self.n, other.n);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for SumsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over set bit positions of a word slice.
pub struct Ones<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl<'a> Ones<'a> {
    fn new(words: &'a [u64]) -> Self {
        Self {
            words,
            index: 0,
            current: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + bit);
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

/// `dst |= src << shift`, truncated to `dst.len()` words.
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let word_shift = shift / WORD_BITS;
    let bit_shift = shift % WORD_BITS;
    if bit_shift == 0 {
        for (d, s) in dst.iter_mut().skip(word_shift).zip(src) {
            *d |= *s;
        }
    } else {
        let mut carry = 0u64;
        let mut d = word_shift;
        for &s in src {
            if d >= dst.len() {
                return;
            }
            dst[d] |= (s << bit_shift) | carry;
            carry = s >> (WORD_BITS - bit_shift);
            d += 1;
        }
        if d < dst.len() {
            dst[d] |= carry;
        }
    }
}

/// Computes `X + X` by OR-ing one shifted copy of `X` per member of `X`.
pub fn sumset(x: &SubsetMask) -> SumsetMask {
    let mut words = vec![0u64; words_for(2 * x.n + 1)];
    for e in x.iter() {
        or_shifted(&mut words, &x.words, e);
    }
    SumsetMask { n: x.n, words }
}

/// `X + X` restricted to `[limit]₀`; skips shifts that only touch larger sums.
pub(crate) fn sumset_prefix(x: &SubsetMask, limit: usize) -> Vec<u64> {
    let mut words = vec![0u64; words_for(limit + 1)];
    for e in x.iter() {
        if e > limit {
            break;
        }
        or_shifted(&mut words, &x.words, e);
    }
    let used = (limit + 1) % WORD_BITS;
    if used != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << used) - 1;
        }
    }
    words
}

/// True iff `[n]₀ ⊆ X + X`.
pub fn is_two_base(x: &SubsetMask) -> bool {
    let covered = sumset_prefix(x, x.n);
    let full = SubsetMask::full(x.n);
    covered == full.words
}

/// `[n]₀ \ (X + X)`.
pub fn uncovered(x: &SubsetMask) -> SubsetMask {
    let covered = sumset_prefix(x, x.n);
    let full = SubsetMask::full(x.n);
    SubsetMask {
        n: x.n,
        words: full.words.iter().zip(&covered).map(|(f, c)| f & !c).collect(),
    }
}

/// `X ∪ ([n]₀ \ (X + X))`, which is always a 2-base: each added `k` is `0 + k`,
/// and `0` is either already a member or was itself uncovered and added.
pub fn complete(x: &SubsetMask) -> SubsetMask {
    x.union(&uncovered(x))
}

/// Single-word sumset kernel for `n < 64`: bit `s` of the result is set iff
/// `s ∈ X + X`, where `X` is given by the bits of `x`.
#[inline]
pub fn sumset_word(x: u64) -> u128 {
    let wide = x as u128;
    let mut acc = 0u128;
    let mut rest = x;
    while rest != 0 {
        let e = rest.trailing_zeros();
        acc |= wide << e;
        rest &= rest - 1;
    }
    acc
}

/// Mask of `[n]₀` in a `u128`, for `n < 128`.
#[inline]
pub(crate) fn low_mask128(n: usize) -> u128 {
    if n >= 127 {
        !0
    } else {
        (1u128 << (n + 1)) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, e: &[usize]) -> SubsetMask {
        SubsetMask::from_elements(n, e.iter().copied()).unwrap()
    }

    fn elems(s: &SumsetMask) -> Vec<usize> {
        s.iter().collect()
    }

    #[test]
    fn sumset_examples() {
        assert_eq!(elems(&sumset(&set(6, &[0, 1, 3]))), vec![0, 1, 2, 3, 4, 6]);
        assert!(sumset(&SubsetMask::empty(5)).is_empty());
        assert_eq!(elems(&sumset(&set(4, &[2]))), vec![4]);
    }

    #[test]
    fn two_base_examples() {
        assert!(is_two_base(&set(6, &[0, 1, 2, 3])));
        assert!(!is_two_base(&set(6, &[0, 1, 3])));
        assert!(!is_two_base(&SubsetMask::empty(0)));
        assert!(is_two_base(&set(0, &[0])));
    }

    #[test]
    fn uncovered_examples() {
        assert_eq!(uncovered(&set(6, &[0, 1, 3])), set(6, &[5]));
        for n in [0, 5, 63, 64, 130] {
            assert!(uncovered(&SubsetMask::full(n)).is_empty());
        }
        assert_eq!(uncovered(&SubsetMask::empty(2)), set(2, &[0, 1, 2]));
    }

    #[test]
    fn complete_examples() {
        let c = complete(&set(6, &[0, 1, 3]));
        assert_eq!(c, set(6, &[0, 1, 3, 5]));
        assert!(is_two_base(&c));
        let base = set(6, &[0, 1, 2, 3]);
        assert_eq!(complete(&base), base);
        assert_eq!(complete(&SubsetMask::empty(2)), set(2, &[0, 1, 2]));
    }

    #[test]
    fn display_and_parse() {
        let s = set(6, &[0, 1, 3]);
        assert_eq!(s.to_string(), "{0,1,3}");
        assert_eq!(SubsetMask::empty(3).to_string(), "{}");
        assert_eq!(SubsetMask::parse(6, "{0,1,3}").unwrap(), s);
        assert_eq!(SubsetMask::parse(6, "{}").unwrap(), SubsetMask::empty(6));
        assert!(SubsetMask::parse(2, "{0,3}").is_err());
        assert!(SubsetMask::parse(2, "0,1").is_err());
    }

    #[test]
    fn nonempty_sumset_contains_twice_min() {
        let s = set(100, &[17, 40, 99]);
        assert!(sumset(&s).contains(34));
        assert!(sumset(&s).contains(198));
    }

    #[test]
    fn word_kernel_matches_general() {
        let x = 0b1011_0110_1001u64;
        let general = sumset(&SubsetMask::from_word(20, x));
        let fast = sumset_word(x);
        for s in 0..=40 {
            assert_eq!(general.contains(s), (fast >> s) & 1 == 1, "s = {s}");
        }
    }

    #[test]
    fn multiword_shift_boundaries() {
        let x = set(200, &[0, 63, 64, 127, 128, 200]);
        let brute: std::collections::BTreeSet<usize> = x
            .iter()
            .flat_map(|a| x.iter().map(move |b| a + b))
            .collect();
        assert_eq!(elems(&sumset(&x)), brute.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn from_word_trims_above_n() {
        let s = SubsetMask::from_word(3, 0xff);
        assert_eq!(s.to_string(), "{0,1,2,3}");
        assert!(!s.contains(4));
    }
}
