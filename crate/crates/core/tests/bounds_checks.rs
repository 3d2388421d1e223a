use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use twobase::bounds::{
    decay_ok, estimate_n0, evaluate, find_n0, le_sqrt, t_squared, t_squared_ratio,
    window_failures,
};
use twobase::Exec;

proptest! {
    #[test]
    fn squares_preserve_order_on_non_negatives(a in 0i64..1_000_000, b in 1i64..1_000_000,
                                                c in 0i64..1_000_000, d in 1i64..1_000_000) {
        let x = BigRational::new(a.into(), b.into());
        let y = BigRational::new(c.into(), d.into());
        prop_assert_eq!(x <= y, &x * &x <= &y * &y);
        prop_assert_eq!(le_sqrt(&x, &(&y * &y)), x <= y);
    }

    #[test]
    fn step_ratio_identity(n in 0usize..3000) {
        prop_assert_eq!(t_squared(n + 1) / t_squared(n), t_squared_ratio(n));
    }
}

#[test]
fn step_ratio_strictly_decreases_through_ten_thousand() {
    let mut prev = t_squared_ratio(0);
    for n in 1..=10_000 {
        let r = t_squared_ratio(n);
        assert!(r < prev, "n = {n}");
        prev = r;
    }
    assert!(prev > BigRational::new(BigInt::from(3), BigInt::from(4)));
}

#[test]
fn threshold_values() {
    let th = find_n0();
    assert_eq!(th.first_decay_n, 519);
    assert_eq!(th.n0, 980);
    assert_eq!(estimate_n0(), th);
    assert!(!decay_ok(518));
    assert!(!evaluate(979).le_tenth);
    assert!(evaluate(980).le_tenth);
}

#[test]
fn both_conditions_hold_on_the_full_window() {
    let th = find_n0();
    assert!(window_failures(th.n0, 10_000, Exec::default()).is_empty());
    // Just before n0, t(n) is still above 1/10.
    assert_eq!(window_failures(th.n0 - 1, 0, Exec::Sequential), vec![th.n0 - 1]);
}
