use clap::ValueEnum;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use twobase::bounds;
use twobase::count::{growth_table_issues, recurrence_holds};
use twobase::probability::{
    check_lemma_notgen, exact_expected_uncovered, exhaustive_miss_counts,
    first_expected_uncovered_violation, gamma_prime_count, meets_gamma_prime_bound,
    EXPECTED_UNCOVERED_LIMIT, GAMMA_PRIME_THRESHOLD,
};

use crate::commands::{CliError, CliResult, Counts};
use crate::config::Config;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    Recurrence,
    LemmaNotgen,
    LemmaExpected,
    GammaPrime,
    DeltaBound,
    Chain,
    Bounds,
}

impl Which {
    fn label(self) -> &'static str {
        match self {
            Which::Recurrence => "recurrence",
            Which::LemmaNotgen => "lemma-notgen",
            Which::LemmaExpected => "lemma-expected",
            Which::GammaPrime => "gamma-prime",
            Which::DeltaBound => "delta-bound",
            Which::Chain => "chain",
            Which::Bounds => "bounds",
        }
    }

    fn default_range(self) -> (usize, usize) {
        match self {
            Which::Recurrence => (0, 18),
            Which::LemmaNotgen => (0, 200),
            Which::LemmaExpected => (0, 10_000),
            Which::GammaPrime => (0, 22),
            Which::DeltaBound | Which::Chain => (0, 30),
            Which::Bounds => (0, 0),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Range {
    min: Option<usize>,
    max: Option<usize>,
}

impl Range {
    pub fn new(n: Option<usize>, min: Option<usize>, max: Option<usize>) -> Self {
        match n {
            Some(n) => Self {
                min: Some(n),
                max: Some(n),
            },
            None => Self { min, max },
        }
    }

    fn resolve(self, which: Which) -> std::ops::RangeInclusive<usize> {
        let (lo, hi) = which.default_range();
        self.min.unwrap_or(lo)..=self.max.unwrap_or(hi)
    }
}

#[derive(Default)]
struct Report {
    label: &'static str,
    passed: usize,
    failed: usize,
    skipped: usize,
}

impl Report {
    fn item(&mut self, ok: bool, what: impl std::fmt::Display) {
        if ok {
            self.passed += 1;
            println!("PASS {} {what}", self.label);
        } else {
            self.failed += 1;
            println!("FAIL {} {what}", self.label);
        }
    }

    fn skip(&mut self, what: impl std::fmt::Display, reason: impl std::fmt::Display) {
        self.skipped += 1;
        println!("SKIP {} {what}: {reason}", self.label);
    }

    /// Records a per-item error: limits become skips, anything else aborts.
    fn limit_or_fail(&mut self, what: impl std::fmt::Display, err: CliError) -> CliResult {
        match err {
            CliError::Core(e @ twobase::Error::LimitExceeded { .. }) => {
                self.skip(what, e);
                Ok(())
            }
            other => Err(other),
        }
    }

    fn finish(self) -> CliResult {
        println!(
            "{}: {} passed, {} failed, {} skipped",
            self.label, self.passed, self.failed, self.skipped
        );
        if self.failed > 0 {
            return Err(CliError::Verification(format!(
                "{}: {} check(s) failed",
                self.label, self.failed
            )));
        }
        Ok(())
    }
}

pub fn run(cfg: &Config, which: Which, range: Range, bases: &[usize], window: usize) -> CliResult {
    let mut report = Report {
        label: which.label(),
        ..Report::default()
    };
    let range = range.resolve(which);
    match which {
        Which::Recurrence => recurrence(cfg, range, &mut report)?,
        Which::LemmaNotgen => {
            for n in range {
                let checks = check_lemma_notgen(n);
                let bad: Vec<usize> = checks.iter().filter(|c| !c.ok).map(|c| c.k).collect();
                report.item(
                    bad.is_empty(),
                    format!("n={n} ({} targets, failing k: {bad:?})", checks.len()),
                );
            }
        }
        Which::LemmaExpected => lemma_expected(range, &mut report),
        Which::GammaPrime => {
            let counter = cfg.counter();
            for n in range {
                match gamma_prime_count(&counter, n, GAMMA_PRIME_THRESHOLD) {
                    Ok(g) => report.item(
                        meets_gamma_prime_bound(n, &g),
                        format!("n={n} |Γ′|={g} ≥ 2^{n}"),
                    ),
                    Err(e) => report.limit_or_fail(format!("n={n}"), e.into())?,
                }
            }
        }
        Which::DeltaBound => delta_bound(cfg, range, &mut report)?,
        Which::Chain => chain(cfg, range, bases, &mut report)?,
        Which::Bounds => {
            let th = bounds::find_n0();
            let prev = bounds::evaluate(th.n0 - 1);
            report.item(
                !(prev.le_tenth && prev.decay_ok),
                format!("n0={} first_decay_n={} (minimal)", th.n0, th.first_decay_n),
            );
            let failures = bounds::window_failures(th.n0, window, cfg.exec());
            report.item(
                failures.is_empty(),
                format!(
                    "t(n) ≤ 1/10 and t(n+1) ≤ 9/10 t(n) on [{}, {}] (failing: {:?})",
                    th.n0,
                    th.n0 + window,
                    &failures[..failures.len().min(10)]
                ),
            );
        }
    }
    report.finish()
}

fn recurrence(cfg: &Config, range: std::ops::RangeInclusive<usize>, report: &mut Report) -> CliResult {
    let mut counts = Counts::open(cfg)?;
    for n in range {
        let pair = counts.get(n).and_then(|a| counts.get(n + 1).map(|b| (a, b)));
        match pair {
            Ok((a, b)) => report.item(
                recurrence_holds(&a, &b),
                format!(
                    "n={n}: {} = {} + {}",
                    b.gamma, a.gamma, a.gamma_next_covered
                ),
            ),
            Err(e) => report.limit_or_fail(format!("n={n}"), e)?,
        }
    }
    Ok(())
}

fn lemma_expected(range: std::ops::RangeInclusive<usize>, report: &mut Report) {
    let (lo, hi) = (*range.start(), *range.end());
    for n in lo..=hi.min(16) {
        let exact = exact_expected_uncovered(n);
        let total: u64 = exhaustive_miss_counts(n)[..=n].iter().sum();
        let average = BigRational::new(total.into(), (num_bigint::BigInt::one() << (n + 1)).into());
        report.item(
            exact == average,
            format!("n={n} exact {exact} equals exhaustive average"),
        );
    }
    let violation = first_expected_uncovered_violation(hi, EXPECTED_UNCOVERED_LIMIT);
    report.item(
        violation.is_none(),
        format!(
            "E|[n]₀ \\ (X+X)| ≤ {EXPECTED_UNCOVERED_LIMIT} for all n ≤ {hi} (first violation: {violation:?})"
        ),
    );
}

fn delta_bound(cfg: &Config, range: std::ops::RangeInclusive<usize>, report: &mut Report) -> CliResult {
    let mut counts = Counts::open(cfg)?;
    for n in range {
        match counts.get(n) {
            Ok(rec) => {
                let ok = bounds::verify_delta_bound(n, &rec.gamma, &rec.gamma_next_covered)?
                    && bounds::delta_lower_bound_holds(&(&rec).into());
                report.item(ok, format!("n={n} δ={}", rec.delta()));
            }
            Err(e) => report.limit_or_fail(format!("n={n}"), e)?,
        }
    }
    Ok(())
}

fn chain(
    cfg: &Config,
    range: std::ops::RangeInclusive<usize>,
    bases: &[usize],
    report: &mut Report,
) -> CliResult {
    let n_max = *range.end();
    let rows = match Counts::open(cfg)?.rows(n_max) {
        Ok(rows) => rows,
        Err(e) => return report.limit_or_fail(format!("n_max={n_max}"), e),
    };
    let issues = growth_table_issues(&rows);
    report.item(
        issues.is_empty(),
        format!("growth table 0..={n_max} consistent {issues:?}"),
    );
    let positive = rows.iter().all(|r| r.gamma >= BigUint::one());
    report.item(positive, "r(n) > 0 for every row");
    for &base in bases {
        let chain = bounds::verify_product_chain(&rows, base)?;
        report.item(
            chain.ok,
            format!(
                "base_n={base}: {} rows, min r(n) = {} ≈ {}",
                chain.checked, chain.min_ratio, chain.min_ratio_float
            ),
        );
    }
    Ok(())
}
