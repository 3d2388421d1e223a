//! Exact certification of the exponential lower-bound chain.
//!
//! The error term `t(n) = (4/√3)(√3/2)^n (n+1)^20` is irrational, so every
//! comparison is made between squares: for non-negative `a`, `b`,
//! `a ≤ b ⇔ a² ≤ b²`. Everything is done in big integers or big rationals.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::count::GrowthRow;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::probability::exact_prob_not_generated;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `(3/4)^e` for any integer `e`.
pub fn pow_three_quarters(e: i64) -> BigRational {
    let a = BigInt::from(3u32).pow(e.unsigned_abs() as u32);
    let b = BigInt::from(4u32).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::new(a, b)
    } else {
        BigRational::new(b, a)
    }
}

/// `x ≤ √r` for `x ≥ 0`, `r ≥ 0`, decided as `x² ≤ r`.
pub fn le_sqrt(x: &BigRational, r: &BigRational) -> bool {
    debug_assert!(!x.is_negative() && !r.is_negative());
    x * x <= *r
}

/// `t(n)² = (16/3) · (3/4)^n · (n+1)^40`.
pub fn t_squared(n: usize) -> BigRational {
    rat(16, 3) * pow_three_quarters(n as i64) * BigRational::from(BigInt::from(n + 1).pow(40))
}

/// `t(n)` evaluated in the log domain, as `ln t(n)`.
pub fn ln_t(n: usize) -> f64 {
    (4.0 / 3f64.sqrt()).ln() + n as f64 * (3f64.sqrt() / 2.0).ln() + 20.0 * ((n + 1) as f64).ln()
}

/// `t(n) ≤ 1/10` ⇔ `1600 · 3^n · (n+1)^40 ≤ 3 · 4^n`, given `3^n` and `4^n`.
fn le_tenth_with(n: usize, pow3: &BigUint, pow4: &BigUint) -> bool {
    let lhs = pow3 * BigUint::from(n + 1).pow(40) * 1600u32;
    lhs <= pow4 * 3u32
}

/// `t(n+1) ≤ (9/10) t(n)` ⇔ `(3/4)((n+2)/(n+1))^40 ≤ 81/100`
/// ⇔ `25 (n+2)^40 ≤ 27 (n+1)^40`.
pub fn decay_ok(n: usize) -> bool {
    BigUint::from(n + 2).pow(40) * 25u32 <= BigUint::from(n + 1).pow(40) * 27u32
}

pub fn le_tenth(n: usize) -> bool {
    le_tenth_with(
        n,
        &BigUint::from(3u32).pow(n as u32),
        &(BigUint::one() << (2 * n)),
    )
}

/// `t(n+1)²/t(n)² = (3/4)(1 + 1/(n+1))^40`.
pub fn t_squared_ratio(n: usize) -> BigRational {
    let step = BigRational::new(BigInt::from(n + 2), BigInt::from(n + 1));
    rat(3, 4) * num_traits::pow(step, 40)
}

/// The squared step ratio falls from `n` to `n + 1`: `(n+3)(n+1) < (n+2)²`,
/// which is the ratio comparison after taking 40th roots.
fn ratio_falls(n: usize) -> bool {
    let (a, b, c) = (BigUint::from(n + 1), BigUint::from(n + 2), BigUint::from(n + 3));
    &c * &a < &b * &b
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEval {
    pub n: usize,
    pub t_squared: BigRational,
    pub le_tenth: bool,
    pub decay_ok: bool,
}

pub fn evaluate(n: usize) -> BoundEval {
    let t_sq = t_squared(n);
    BoundEval {
        n,
        le_tenth: t_sq <= rat(1, 100),
        decay_ok: t_squared(n + 1) <= rat(81, 100) * &t_sq,
        t_squared: t_sq,
    }
}

/// JSON shape of a single evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundEvalJson {
    pub n: usize,
    pub t_squared_num: String,
    pub t_squared_den: String,
    pub le_tenth: bool,
    pub decay_ok: bool,
}

impl From<&BoundEval> for BoundEvalJson {
    fn from(e: &BoundEval) -> Self {
        Self {
            n: e.n,
            t_squared_num: e.t_squared.numer().to_string(),
            t_squared_den: e.t_squared.denom().to_string(),
            le_tenth: e.le_tenth,
            decay_ok: e.decay_ok,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Threshold {
    pub n0: usize,
    pub first_decay_n: usize,
}

/// The smallest `n₀` such that `t(n) ≤ 1/10` and `t(n+1) ≤ (9/10) t(n)` for
/// every `n ≥ n₀`.
///
/// The squared step ratio `(3/4)(1 + 1/(n+1))^40` strictly decreases towards
/// `3/4 < 81/100` (checked at every scanned `n`), so the decay condition
/// holds from its first occurrence onwards and `t` strictly decreases from
/// there. `n₀` is then the first `n` past that point with `t(n) ≤ 1/10`.
pub fn find_n0() -> Threshold {
    let mut n = 0;
    while !decay_ok(n) {
        assert!(ratio_falls(n), "step ratio failed to decrease at n = {n}");
        n += 1;
    }
    let first_decay_n = n;
    let mut pow3 = BigUint::from(3u32).pow(n as u32);
    let mut pow4 = BigUint::one() << (2 * n);
    while !le_tenth_with(n, &pow3, &pow4) {
        assert!(ratio_falls(n), "step ratio failed to decrease at n = {n}");
        n += 1;
        pow3 *= 3u32;
        pow4 <<= 2;
    }
    Threshold {
        n0: n,
        first_decay_n,
    }
}

/// Float pre-estimate of [`find_n0`] from the log domain.
pub fn estimate_n0() -> Threshold {
    let ln_ratio = |n: usize| ln_t(n + 1) - ln_t(n);
    let mut n = 0;
    while ln_ratio(n) > 0.9f64.ln() {
        n += 1;
    }
    let first_decay_n = n;
    while ln_t(n) > 0.1f64.ln() {
        n += 1;
    }
    Threshold {
        n0: n,
        first_decay_n,
    }
}

const WINDOW_CHUNK: usize = 512;

/// Exactly checks both conditions for every `n ∈ [start, start + len]` and
/// returns the `n` where either fails.
pub fn window_failures(start: usize, len: usize, exec: Exec) -> Vec<usize> {
    let end = start + len;
    let chunks = (len / WINDOW_CHUNK + 1) as u64;
    let mut failures = exec.map_reduce(
        0..chunks,
        Vec::new,
        |chunk| {
            let lo = start + chunk as usize * WINDOW_CHUNK;
            let hi = (lo + WINDOW_CHUNK).min(end + 1);
            let mut pow3 = BigUint::from(3u32).pow(lo as u32);
            let mut pow4 = BigUint::one() << (2 * lo);
            let mut bad = Vec::new();
            for n in lo..hi {
                if !(le_tenth_with(n, &pow3, &pow4) && decay_ok(n)) {
                    bad.push(n);
                }
                pow3 *= 3u32;
                pow4 <<= 2;
            }
            bad
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    failures.sort_unstable();
    failures
}

/// `(2 · (3/4)^((n-1)/2) · (n+1)^20)²`, the squared right-hand side of
/// `1 - δ(n) ≤ 2 (3/4)^((n-1)/2) (n+1)^20`. Equal to `t(n)²`.
pub fn delta_bound_rhs_squared(n: usize) -> BigRational {
    BigRational::from_integer(4.into())
        * pow_three_quarters(n as i64 - 1)
        * BigRational::from(BigInt::from(n + 1).pow(40))
}

/// Checks `1 - δ(n) ≤ 2 (3/4)^((n-1)/2) (n+1)^20` exactly, together with the
/// intermediate step `#{X ⊆ [n]₀ : n+1 ∉ X+X} ≥ |Γ(n)| - gamma_next`.
pub fn verify_delta_bound(n: usize, gamma: &BigUint, gamma_next: &BigUint) -> Result<bool> {
    if gamma_next > gamma {
        return Err(Error::BadArgument(format!(
            "gamma_next_covered {gamma_next} exceeds gamma {gamma} at n = {n}"
        )));
    }
    if gamma.is_zero() {
        return Err(Error::BadArgument(format!("gamma is zero at n = {n}")));
    }
    let gap = gamma - gamma_next;
    let one_minus_delta = BigRational::new(BigInt::from(gap.clone()), BigInt::from(gamma.clone()));
    let bound_ok = le_sqrt(&one_minus_delta, &delta_bound_rhs_squared(n));

    let p = exact_prob_not_generated(n, n + 1)?;
    let missing = (p.numerator << (n + 1)) / p.denominator;
    Ok(bound_ok && missing >= gap)
}

/// `1 + δ(n) ≥ 2 - t(n)`, i.e. `1 - δ(n) ≤ t(n)`, via squares.
pub fn delta_lower_bound_holds(row: &GrowthRow) -> bool {
    let one_minus = BigRational::one() - &row.delta;
    !one_minus.is_negative() && le_sqrt(&one_minus, &t_squared(row.n))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainReport {
    pub ok: bool,
    pub base_n: usize,
    pub checked: usize,
    /// `min r(n)` over the rows.
    pub min_ratio: BigRational,
    pub min_ratio_float: f64,
}

/// Checks `|Γ(n)|/2^n = (|Γ(base)|/2^n) · Π_{k=base}^{n-1} (1 + δ(k))` for
/// every row at or after `base_n`.
pub fn verify_product_chain(rows: &[GrowthRow], base_n: usize) -> Result<ChainReport> {
    let first = rows
        .first()
        .ok_or_else(|| Error::BadArgument("empty growth table".into()))?
        .n;
    if base_n < first || base_n - first >= rows.len() {
        return Err(Error::BadArgument(format!(
            "base_n = {base_n} is outside the table [{first}, {}]",
            first + rows.len() - 1
        )));
    }
    if rows.iter().enumerate().any(|(i, r)| r.n != first + i) {
        return Err(Error::BadArgument("growth table rows are not consecutive".into()));
    }
    let base = &rows[base_n - first];
    let base_gamma = BigRational::from(BigInt::from(base.gamma.clone()));
    let mut product = BigRational::one();
    let mut ok = true;
    let mut checked = 0;
    for row in &rows[base_n - first..] {
        let scale = BigRational::from(BigInt::one() << row.n);
        let lhs = BigRational::from(BigInt::from(row.gamma.clone())) / &scale;
        let rhs = &base_gamma / &scale * &product;
        ok &= lhs == rhs;
        checked += 1;
        product *= BigRational::one() + &row.delta;
    }
    let min_ratio = rows
        .iter()
        .map(|r| r.ratio.clone())
        .min()
        .expect("non-empty");
    Ok(ChainReport {
        ok,
        base_n,
        checked,
        min_ratio_float: min_ratio.to_f64().unwrap_or(f64::NAN),
        min_ratio,
    })
}
