mod common;

use common::{ref_eval_nat, Generator};
use diagforge::diagonal::{diagonal, iterate, witness_table, Family, Machine, Provenance};
use diagforge::enumeration::Tier;
use diagforge::kernel::{parse, EvalBudget};
use num_bigint::BigUint;

#[test]
fn witnesses_match_reference_values() {
    let programs = Generator::natfn().nat_programs(6);
    let rows = witness_table(&Machine::base(Tier::NatFn), 300).unwrap();
    for (k, w) in rows.iter().enumerate() {
        let n = k as u64 + 1;
        let f = ref_eval_nat(&parse(&programs[k]).unwrap(), n);
        assert_eq!(w.index, n);
        assert_eq!(w.fn_at_index, f, "{}", programs[k]);
        assert_eq!(w.diag_at, f + 1u8);
        assert!(w.holds());
    }
}

#[test]
fn diagonal_at_zero_follows_one() {
    let g = diagonal(&Machine::base(Tier::NatFn));
    assert_eq!(g.apply(0).unwrap(), g.apply(1).unwrap());
    assert_eq!(g.apply(1).unwrap(), BigUint::from(2u8));
}

#[test]
fn iteration_escapes_every_machine() {
    let m0 = Machine::base(Tier::NatFn);
    let (m, gs) = iterate(&m0, 4).unwrap();
    assert_eq!(m.depth(), 4);
    assert_eq!(m.describe(), "base(natfn)+4");
    // the newest diagonal is first, the base program order follows
    assert!(m.fn_at(1).unwrap().same(&gs[3]));
    assert!(m.fn_at(4).unwrap().same(&gs[0]));
    assert_eq!(m.fn_at(5).unwrap().label(), "n");
    for w in gs.windows(2) {
        assert_eq!(w[1].apply(1).unwrap(), w[0].apply(1).unwrap() + 1u8);
    }
    for (i, g) in gs.iter().enumerate() {
        assert!(matches!(g.provenance(), Provenance::DiagonalOf(_)));
        let machine = if i == 0 { m0.clone() } else { iterate(&m0, i).unwrap().0 };
        for n in 1..=20 {
            let f = machine.fn_at(n).unwrap().apply(n).unwrap();
            assert_eq!(g.apply(n).unwrap(), f + 1u8);
        }
    }
}

#[test]
fn exhausted_budget_is_reported() {
    let m = Machine::base_with_budget(Tier::NatFn, EvalBudget::new(3));
    assert!(witness_table(&m, 40).is_err());
}

#[test]
fn full_tier_diagonal() {
    let rows = witness_table(&Machine::base(Tier::Full), 200).unwrap();
    assert!(rows.iter().all(|w| w.holds()));
}
