//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's enumerator or evaluator; terms are produced as text and
//! interpreted directly.

#![allow(dead_code)]

use std::collections::HashMap;

use diagforge::kernel::{Term, Value};
use num_bigint::BigUint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum S {
    Nat,
    Bool,
    List,
}

/// (name, result sort or None for "any", argument sorts (None = same as
/// result), variables bound in each argument)
struct Ctor {
    name: &'static str,
    result: Option<S>,
    args: &'static [Option<S>],
    binds: &'static [&'static [(&'static str, S)]],
}

const NONE: &[(&str, S)] = &[];
const PRED: &[(&str, S)] = &[("x", S::Nat), ("pivot", S::Nat)];

const CTORS: &[Ctor] = &[
    Ctor {
        name: "zero",
        result: Some(S::Nat),
        args: &[],
        binds: &[],
    },
    Ctor {
        name: "succ",
        result: Some(S::Nat),
        args: &[Some(S::Nat)],
        binds: &[NONE],
    },
    Ctor {
        name: "add",
        result: Some(S::Nat),
        args: &[Some(S::Nat), Some(S::Nat)],
        binds: &[NONE, NONE],
    },
    Ctor {
        name: "mul",
        result: Some(S::Nat),
        args: &[Some(S::Nat), Some(S::Nat)],
        binds: &[NONE, NONE],
    },
    Ctor {
        name: "precnat",
        result: Some(S::Nat),
        args: &[Some(S::Nat), Some(S::Nat), Some(S::Nat)],
        binds: &[NONE, &[("acc", S::Nat), ("idx", S::Nat)], NONE],
    },
    Ctor {
        name: "nil",
        result: Some(S::List),
        args: &[],
        binds: &[],
    },
    Ctor {
        name: "cons",
        result: Some(S::List),
        args: &[Some(S::Nat), Some(S::List)],
        binds: &[NONE, NONE],
    },
    Ctor {
        name: "first",
        result: Some(S::Nat),
        args: &[Some(S::List)],
        binds: &[NONE],
    },
    Ctor {
        name: "rest",
        result: Some(S::List),
        args: &[Some(S::List)],
        binds: &[NONE],
    },
    Ctor {
        name: "append",
        result: Some(S::List),
        args: &[Some(S::List), Some(S::List)],
        binds: &[NONE, NONE],
    },
    Ctor {
        name: "len",
        result: Some(S::Nat),
        args: &[Some(S::List)],
        binds: &[NONE],
    },
    Ctor {
        name: "lt",
        result: Some(S::Bool),
        args: &[Some(S::Nat), Some(S::Nat)],
        binds: &[NONE, NONE],
    },
    Ctor {
        name: "if",
        result: None,
        args: &[Some(S::Bool), None, None],
        binds: &[NONE, NONE, NONE],
    },
    Ctor {
        name: "filter",
        result: Some(S::List),
        args: &[Some(S::List), Some(S::Bool)],
        binds: &[NONE, &[("x", S::Nat)]],
    },
    Ctor {
        name: "pivotrec",
        result: Some(S::List),
        args: &[Some(S::List), Some(S::Bool), Some(S::Bool), Some(S::List)],
        binds: &[NONE, PRED, PRED, &[("l", S::List), ("pivot", S::Nat), ("r", S::List)]],
    },
];

pub const RANKS: [&str; 22] = [
    "n", "zero", "succ", "add", "mul", "precnat", "nil", "cons", "first", "rest", "append", "len", "lt", "if",
    "filter", "pivotrec", "x", "acc", "idx", "pivot", "l", "r",
];

pub const NATFN: &[&str] = &["zero", "succ", "add", "mul", "precnat"];

type MemoKey = (S, Vec<(&'static str, S)>, usize);

/// Exhaustive generator for every well-formed term of a given sort and size
/// over an allowed constructor set.
pub struct Generator {
    allowed: Vec<&'static str>,
    memo: HashMap<MemoKey, Vec<String>>,
}

impl Generator {
    pub fn new(allowed: &[&'static str]) -> Generator {
        Generator {
            allowed: allowed.to_vec(),
            memo: HashMap::new(),
        }
    }

    pub fn natfn() -> Generator {
        Generator::new(NATFN)
    }

    pub fn full() -> Generator {
        Generator::new(&CTORS.iter().map(|c| c.name).collect::<Vec<_>>())
    }

    /// `scope` lists (variable, sort) pairs; later entries shadow earlier.
    pub fn terms(&mut self, sort: S, scope: &[(&'static str, S)], size: usize) -> Vec<String> {
        let mut scope_norm: Vec<(&'static str, S)> = Vec::new();
        for &(v, s) in scope.iter().rev() {
            if !scope_norm.iter().any(|(w, _)| *w == v) {
                scope_norm.push((v, s));
            }
        }
        scope_norm.sort();
        let key = (sort, scope_norm.clone(), size);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            for &(v, s) in &scope_norm {
                if s == sort {
                    out.push(v.to_string());
                }
            }
        }
        for c in CTORS {
            if !self.allowed.contains(&c.name) || c.result.is_some_and(|r| r != sort) {
                continue;
            }
            if c.args.is_empty() {
                if size == 1 {
                    out.push(c.name.to_string());
                }
                continue;
            }
            if size < 1 + c.args.len() {
                continue;
            }
            for split in compositions(size - 1, c.args.len()) {
                let mut parts: Vec<Vec<String>> = Vec::new();
                for (i, &a) in split.iter().enumerate() {
                    let mut inner: Vec<(&'static str, S)> = scope_norm.clone();
                    inner.extend(c.binds[i].iter().copied());
                    parts.push(self.terms(c.args[i].unwrap_or(sort), &inner, a));
                }
                for combo in product(&parts) {
                    out.push(format!("({} {})", c.name, combo.join(" ")));
                }
            }
        }
        self.memo.insert(key, out.clone());
        out
    }

    /// Programs of sort nat in `n : nat`, up to `max_size`, in canonical order.
    pub fn nat_programs(&mut self, max_size: usize) -> Vec<String> {
        let mut all = Vec::new();
        for s in 1..=max_size {
            let mut layer = self.terms(S::Nat, &[("n", S::Nat)], s);
            layer.sort_by_key(|t| rank_key(t));
            all.extend(layer);
        }
        all
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..total {
        for rest in compositions(total - first, parts - 1) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

fn product(parts: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for p in parts {
        let mut next = Vec::new();
        for prefix in &out {
            for item in p {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

pub fn tokens(sexpr: &str) -> Vec<&str> {
    sexpr
        .split(|c: char| c == '(' || c == ')' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Pre-order rank sequence read straight off the text.
pub fn rank_key(sexpr: &str) -> (usize, Vec<usize>) {
    let r: Vec<usize> = tokens(sexpr)
        .iter()
        .map(|t| RANKS.iter().position(|n| n == t).expect("known token"))
        .collect();
    (r.len(), r)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RV {
    N(BigUint),
    B(bool),
    L(Vec<BigUint>),
}

impl RV {
    fn n(&self) -> BigUint {
        match self {
            RV::N(v) => v.clone(),
            other => panic!("expected nat, got {other:?}"),
        }
    }

    fn b(&self) -> bool {
        match self {
            RV::B(v) => *v,
            other => panic!("expected bool, got {other:?}"),
        }
    }

    fn l(&self) -> Vec<BigUint> {
        match self {
            RV::L(v) => v.clone(),
            other => panic!("expected list, got {other:?}"),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            RV::N(v) => Value::Nat(v.clone()),
            RV::B(b) => Value::Bool(*b),
            RV::L(l) => Value::List(l.clone()),
        }
    }

    pub fn from_value(v: &Value) -> RV {
        match v {
            Value::Nat(n) => RV::N(n.clone()),
            Value::Bool(b) => RV::B(*b),
            Value::List(l) => RV::L(l.clone()),
        }
    }
}

/// Direct recursive interpreter, no budget. Only for small terms.
pub fn ref_eval(t: &Term, env: &[(&'static str, RV)]) -> RV {
    let a = t.args();
    let name = t.op().name();
    let with = |extra: Vec<(&'static str, RV)>, body: &Term| {
        let mut e = env.to_vec();
        e.extend(extra);
        ref_eval(body, &e)
    };
    match name {
        "zero" => RV::N(BigUint::from(0u8)),
        "succ" => RV::N(ref_eval(&a[0], env).n() + 1u8),
        "add" => RV::N(ref_eval(&a[0], env).n() + ref_eval(&a[1], env).n()),
        "mul" => RV::N(ref_eval(&a[0], env).n() * ref_eval(&a[1], env).n()),
        "precnat" => {
            let mut acc = ref_eval(&a[0], env);
            let times = ref_eval(&a[2], env).n();
            let mut i = BigUint::from(0u8);
            while i < times {
                acc = with(vec![("acc", acc), ("idx", RV::N(i.clone()))], &a[1]);
                i += 1u8;
            }
            acc
        }
        "nil" => RV::L(vec![]),
        "cons" => {
            let mut l = vec![ref_eval(&a[0], env).n()];
            l.extend(ref_eval(&a[1], env).l());
            RV::L(l)
        }
        "first" => RV::N(ref_eval(&a[0], env).l().first().cloned().unwrap_or_default()),
        "rest" => RV::L(ref_eval(&a[0], env).l().into_iter().skip(1).collect()),
        "append" => {
            let mut l = ref_eval(&a[0], env).l();
            l.extend(ref_eval(&a[1], env).l());
            RV::L(l)
        }
        "len" => RV::N(BigUint::from(ref_eval(&a[0], env).l().len())),
        "lt" => RV::B(ref_eval(&a[0], env).n() < ref_eval(&a[1], env).n()),
        "if" => {
            if ref_eval(&a[0], env).b() {
                ref_eval(&a[1], env)
            } else {
                ref_eval(&a[2], env)
            }
        }
        "filter" => RV::L(
            ref_eval(&a[0], env)
                .l()
                .into_iter()
                .filter(|x| with(vec![("x", RV::N(x.clone()))], &a[1]).b())
                .collect(),
        ),
        "pivotrec" => RV::L(pivot(t, ref_eval(&a[0], env).l(), env)),
        var => env
            .iter()
            .rev()
            .find(|(v, _)| *v == var)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(|| panic!("unbound {var}")),
    }
}

fn pivot(node: &Term, list: Vec<BigUint>, env: &[(&'static str, RV)]) -> Vec<BigUint> {
    if list.is_empty() {
        return vec![];
    }
    let a = node.args();
    let p = list[0].clone();
    let side = |pred: &Term| -> Vec<BigUint> {
        list[1..]
            .iter()
            .filter(|x| {
                let mut e = env.to_vec();
                e.push(("x", RV::N((*x).clone())));
                e.push(("pivot", RV::N(p.clone())));
                ref_eval(pred, &e).b()
            })
            .cloned()
            .collect()
    };
    let (l, r) = (side(&a[1]), side(&a[2]));
    let mut e = env.to_vec();
    e.push(("l", RV::L(pivot(node, l, env))));
    e.push(("pivot", RV::N(p)));
    e.push(("r", RV::L(pivot(node, r, env))));
    ref_eval(&a[3], &e).l()
}

pub fn ref_eval_nat(t: &Term, n: u64) -> BigUint {
    ref_eval(t, &[("n", RV::N(BigUint::from(n)))]).n()
}

/// Every duplicate-free list of length at most `max_len` over `0..alphabet`.
pub fn distinct_lists(max_len: usize, alphabet: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<u64>> = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            for x in 0..alphabet {
                if !l.contains(&x) {
                    let mut m = l.clone();
                    m.push(x);
                    next.push(m);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn sorted(mut l: Vec<u64>) -> Vec<u64> {
    l.sort_unstable();
    l
}
