use std::collections::BTreeSet;

use proptest::prelude::*;
use twobase::sumset::{complete, is_two_base, sumset, uncovered, SubsetMask};

fn pair_sums(x: &SubsetMask) -> BTreeSet<usize> {
    let members: Vec<usize> = x.iter().collect();
    let mut out = BTreeSet::new();
    for &a in &members {
        for &b in &members {
            out.insert(a + b);
        }
    }
    out
}

fn subset(max_n: usize) -> impl Strategy<Value = SubsetMask> {
    (0..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n + 1).prop_map(move |bits| {
            SubsetMask::from_elements(n, bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
                .unwrap()
        })
    })
}

#[test]
fn shift_or_matches_pair_loop_exhaustively() {
    for n in 0..=12 {
        for bits in 0..1u64 << (n + 1) {
            let x = SubsetMask::from_word(n, bits);
            let fast: BTreeSet<usize> = sumset(&x).iter().collect();
            assert_eq!(fast, pair_sums(&x), "n = {n}, X = {x}");
        }
    }
}

#[test]
fn shift_or_matches_pair_loop_at_sixteen() {
    // Every subset of [16]₀ with a stride to keep the run short.
    let n = 16;
    for bits in (0..1u64 << (n + 1)).step_by(7) {
        let x = SubsetMask::from_word(n, bits);
        let fast: BTreeSet<usize> = sumset(&x).iter().collect();
        assert_eq!(fast, pair_sums(&x));
    }
}

proptest! {
    #[test]
    fn completion_is_a_base(x in subset(64)) {
        let c = complete(&x);
        prop_assert!(is_two_base(&c));
        prop_assert!(x.is_subset(&c));
    }

    #[test]
    fn uncovered_empty_iff_base(x in subset(40)) {
        prop_assert_eq!(uncovered(&x).is_empty(), is_two_base(&x));
    }

    #[test]
    fn shift_or_matches_pair_loop_random(x in subset(512)) {
        let fast: BTreeSet<usize> = sumset(&x).iter().collect();
        prop_assert_eq!(fast, pair_sums(&x));
    }

    #[test]
    fn sumset_is_monotone(x in subset(200), extra in proptest::collection::vec(any::<u16>(), 0..20)) {
        let n = x.n();
        let mut y = x.clone();
        for e in extra {
            y.insert(e as usize % (n + 1));
        }
        prop_assert!(sumset(&x).is_subset(&sumset(&y)));
    }

    #[test]
    fn sums_stay_in_range_and_include_twice_min(x in subset(300)) {
        let s = sumset(&x);
        prop_assert!(s.iter().all(|v| v <= 2 * x.n()));
        if let Some(m) = x.min_element() {
            prop_assert!(s.contains(2 * m));
        }
    }

    #[test]
    fn display_round_trips(x in subset(150)) {
        prop_assert_eq!(SubsetMask::parse(x.n(), &x.to_string()).unwrap(), x);
    }
}
