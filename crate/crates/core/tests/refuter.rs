mod common;

use common::{ref_eval_nat, Generator};
use diagforge::diagonal::{witness_table, Machine};
use diagforge::enumeration::Tier;
use diagforge::kernel::parse;
use diagforge::refuter::{accepted_stream, refute, refute_with, Classifier, Policy, RefuteError, RefuteOptions};

fn opts(horizon: u64) -> RefuteOptions {
    RefuteOptions {
        horizon,
        ..RefuteOptions::default()
    }
}

#[test]
fn maxsize_witnesses_match_reference() {
    let small: Vec<String> = Generator::natfn().nat_programs(3);
    assert_eq!(small.len(), 14);
    let c = Classifier::Builtin(Policy::MaxSize(3));
    let report = refute_with(&c, Tier::NatFn, 14, opts(1_000)).unwrap();
    for (k, w) in report.witnesses.iter().enumerate() {
        let n = k as u64 + 1;
        assert_eq!(report.accepted_prefix[k].1.term().to_string(), small[k]);
        let f = ref_eval_nat(&parse(&small[k]).unwrap(), n);
        assert_eq!(w.diag_at, f + 1u8);
    }
    let err = refute_with(&c, Tier::NatFn, 15, opts(1_000)).unwrap_err();
    assert_eq!(
        err,
        RefuteError::EmptyClassifier {
            accepted: 14,
            wanted: 15,
            horizon: 1_000
        }
    );
}

#[test]
fn none_is_empty() {
    let c = Classifier::Builtin(Policy::None);
    assert!(matches!(
        refute_with(&c, Tier::NatFn, 1, opts(500)),
        Err(RefuteError::EmptyClassifier { accepted: 0, .. })
    ));
    let mut s = accepted_stream(&c, Tier::NatFn, 500);
    assert!(s.next().is_none());
    assert!(s.exhausted());
}

#[test]
fn constant_decider_reproduces_the_plain_diagonal() {
    let c = Classifier::program(&parse("(succ zero)").unwrap()).unwrap();
    let r = refute(&c, Tier::NatFn, 100).unwrap();
    assert_eq!(r.witnesses, witness_table(&Machine::base(Tier::NatFn), 100).unwrap());
    let all = refute(&Classifier::Builtin(Policy::All), Tier::NatFn, 100).unwrap();
    assert_eq!(all.witnesses, r.witnesses);
}

#[test]
fn program_decider_selects_indices() {
    // the step flips acc between 1 and 0, so even indices map to 1
    let parity = "(precnat (succ zero) (precnat (succ zero) zero acc) n)";
    let c = Classifier::program(&parse(parity).unwrap()).unwrap();
    let r = refute_with(&c, Tier::NatFn, 10, opts(1_000)).unwrap();
    let programs = Generator::natfn().nat_programs(5);
    for (k, (i, p)) in r.accepted_prefix.iter().enumerate() {
        assert_eq!(ref_eval_nat(&parse(parity).unwrap(), *i), 1u8.into());
        assert_eq!(p.term().to_string(), programs[*i as usize - 1]);
        let f = ref_eval_nat(p.term(), k as u64 + 1);
        assert_eq!(r.witnesses[k].diag_at, f + 1u8);
    }
    assert!(r.accepted_prefix.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn decider_must_be_natfn() {
    assert!(Classifier::program(&parse("(len nil)").unwrap()).is_err());
    assert!(Classifier::program(&parse("acc").unwrap()).is_err());
}

#[test]
fn header_line() {
    let r = refute(&Classifier::Builtin(Policy::MaxSize(2)), Tier::NatFn, 3).unwrap();
    let lines = r.json_lines();
    assert_eq!(lines[0], r#"{"classifier":"maxsize:2","tier":"natfn","N":3}"#);
    assert_eq!(lines.len(), 4);
}
