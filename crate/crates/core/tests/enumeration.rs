mod common;

use std::collections::HashSet;

use common::{rank_key, Generator};
use diagforge::enumeration::{enumerate_stream, index_of, program_at, EnumError, Tier};
use diagforge::kernel::parse;
use proptest::prelude::*;

#[test]
fn natfn_order_matches_brute_force() {
    let oracle = Generator::natfn().nat_programs(6);
    for (i, want) in oracle.iter().enumerate() {
        let got = program_at(Tier::NatFn, i as u64 + 1).unwrap();
        assert_eq!(&got.term().to_string(), want, "index {}", i + 1);
    }
}

#[test]
fn full_order_matches_brute_force() {
    let oracle = Generator::full().nat_programs(5);
    let e = Tier::Full.enumeration();
    let got: Vec<String> = (1..=oracle.len() as u64)
        .map(|i| e.program_at(i).unwrap().term().to_string())
        .collect();
    assert_eq!(got, oracle);
}

#[test]
fn counts_match_brute_force() {
    let mut g = Generator::natfn();
    let e = Tier::NatFn.enumeration();
    for size in 1..=8 {
        let n = g.terms(common::S::Nat, &[("n", common::S::Nat)], size).len();
        assert_eq!(e.count_of_size(size), n as u128, "size {size}");
    }
    let mut f = Generator::full();
    let e = Tier::Full.enumeration();
    for size in 1..=6 {
        let n = f.terms(common::S::Nat, &[("n", common::S::Nat)], size).len();
        assert_eq!(e.count_of_size(size), n as u128, "full size {size}");
    }
}

#[test]
fn index_of_inverts_program_at_on_small_terms() {
    for (i, t) in Generator::natfn().nat_programs(5).iter().enumerate() {
        let term = parse(t).unwrap();
        let idx = index_of(Tier::NatFn, &term).unwrap();
        assert_eq!(idx, i as u64 + 1);
        assert_eq!(program_at(Tier::NatFn, idx).unwrap().term(), &term);
    }
}

#[test]
fn program_at_inverts_index_of_on_a_prefix() {
    for i in 1..=5000 {
        let p = program_at(Tier::NatFn, i).unwrap();
        assert_eq!(index_of(Tier::NatFn, p.term()).unwrap(), i);
    }
}

#[test]
fn stream_prefix_is_canonical() {
    let mut seen = HashSet::new();
    let mut last = (0, vec![]);
    for (k, (i, p)) in enumerate_stream(Tier::NatFn).take(10_000).enumerate() {
        assert_eq!(i, k as u64 + 1);
        let s = p.term().to_string();
        let key = rank_key(&s);
        assert!(key > last, "{s} out of order");
        last = key;
        assert!(seen.insert(s));
    }
}

#[test]
fn rejections() {
    assert_eq!(program_at(Tier::NatFn, 0), Err(EnumError::IndexZero));
    assert!(matches!(
        index_of(Tier::NatFn, &parse("(len nil)").unwrap()),
        Err(EnumError::NotInTier(_))
    ));
    assert!(matches!(
        index_of(Tier::NatFn, &parse("acc").unwrap()),
        Err(EnumError::NotInTier(_))
    ));
    assert!(index_of(Tier::Full, &parse("(len nil)").unwrap()).is_ok());
    assert!(matches!(
        index_of(Tier::Full, &parse("nil").unwrap()),
        Err(EnumError::NotInTier(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn full_tier_round_trips(i in 1u64..5_000_000) {
        let p = program_at(Tier::Full, i).unwrap();
        prop_assert_eq!(index_of(Tier::Full, p.term()).unwrap(), i);
    }

    #[test]
    fn consecutive_indices_increase(i in 1u64..1_000_000) {
        let a = program_at(Tier::NatFn, i).unwrap().term().to_string();
        let b = program_at(Tier::NatFn, i + 1).unwrap().term().to_string();
        prop_assert!(rank_key(&a) < rank_key(&b));
    }
}
