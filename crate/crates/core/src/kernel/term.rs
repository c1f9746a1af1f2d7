use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// The three sorts of the kernel language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Nat,
    Bool,
    #[serde(rename = "list")]
    ListNat,
}

impl Sort {
    pub const ALL: [Sort; 3] = [Sort::Nat, Sort::Bool, Sort::ListNat];

    pub(crate) fn index(self) -> usize {
        match self {
            Sort::Nat => 0,
            Sort::Bool => 1,
            Sort::ListNat => 2,
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Nat => "nat",
            Sort::Bool => "bool",
            Sort::ListNat => "list",
        })
    }
}

/// Variables of the kernel. `N` is the program input; the rest are only
/// ever bound by `precnat`, `filter` or `pivotrec`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    N,
    X,
    Acc,
    Idx,
    Pivot,
    L,
    R,
}

impl Var {
    pub const ALL: [Var; 7] = [Var::N, Var::X, Var::Acc, Var::Idx, Var::Pivot, Var::L, Var::R];

    pub fn name(self) -> &'static str {
        match self {
            Var::N => "n",
            Var::X => "x",
            Var::Acc => "acc",
            Var::Idx => "idx",
            Var::Pivot => "pivot",
            Var::L => "l",
            Var::R => "r",
        }
    }

    /// Sort of a binder-introduced variable. The input `n` takes whatever
    /// sort the enclosing signature assigns it.
    pub fn bound_sort(self) -> Option<Sort> {
        match self {
            Var::N => None,
            Var::X | Var::Acc | Var::Idx | Var::Pivot => Some(Sort::Nat),
            Var::L | Var::R => Some(Sort::ListNat),
        }
    }

    pub(crate) fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// A node label. Each label carries a fixed rank; the rank table orders
/// the enumeration inside a size class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    Zero,
    Succ,
    Add,
    Mul,
    PrecNat,
    Nil,
    Cons,
    First,
    Rest,
    Append,
    Len,
    Lt,
    If,
    Filter,
    PivotRec,
    Var(Var),
}

impl Op {
    /// All labels in rank order.
    pub const ALL: [Op; 22] = [
        Op::Var(Var::N),
        Op::Zero,
        Op::Succ,
        Op::Add,
        Op::Mul,
        Op::PrecNat,
        Op::Nil,
        Op::Cons,
        Op::First,
        Op::Rest,
        Op::Append,
        Op::Len,
        Op::Lt,
        Op::If,
        Op::Filter,
        Op::PivotRec,
        Op::Var(Var::X),
        Op::Var(Var::Acc),
        Op::Var(Var::Idx),
        Op::Var(Var::Pivot),
        Op::Var(Var::L),
        Op::Var(Var::R),
    ];

    pub fn rank(self) -> u8 {
        match self {
            Op::Var(Var::N) => 0,
            Op::Zero => 1,
            Op::Succ => 2,
            Op::Add => 3,
            Op::Mul => 4,
            Op::PrecNat => 5,
            Op::Nil => 6,
            Op::Cons => 7,
            Op::First => 8,
            Op::Rest => 9,
            Op::Append => 10,
            Op::Len => 11,
            Op::Lt => 12,
            Op::If => 13,
            Op::Filter => 14,
            Op::PivotRec => 15,
            Op::Var(Var::X) => 16,
            Op::Var(Var::Acc) => 17,
            Op::Var(Var::Idx) => 18,
            Op::Var(Var::Pivot) => 19,
            Op::Var(Var::L) => 20,
            Op::Var(Var::R) => 21,
        }
    }

    pub fn from_rank(rank: u8) -> Option<Op> {
        Op::ALL.get(rank as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Op::Zero => "zero",
            Op::Succ => "succ",
            Op::Add => "add",
            Op::Mul => "mul",
            Op::PrecNat => "precnat",
            Op::Nil => "nil",
            Op::Cons => "cons",
            Op::First => "first",
            Op::Rest => "rest",
            Op::Append => "append",
            Op::Len => "len",
            Op::Lt => "lt",
            Op::If => "if",
            Op::Filter => "filter",
            Op::PivotRec => "pivotrec",
            Op::Var(v) => v.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Op> {
        Op::ALL.iter().copied().find(|op| op.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Op::Zero | Op::Nil | Op::Var(_) => 0,
            Op::Succ | Op::First | Op::Rest | Op::Len => 1,
            Op::Add | Op::Mul | Op::Cons | Op::Append | Op::Lt | Op::Filter => 2,
            Op::PrecNat | Op::If => 3,
            Op::PivotRec => 4,
        }
    }

    /// Result sort of non-variable labels; `None` for `if` (its result
    /// follows its branches) and for variables.
    pub fn result_sort(self) -> Option<Sort> {
        match self {
            Op::Zero | Op::Succ | Op::Add | Op::Mul | Op::PrecNat | Op::First | Op::Len => Some(Sort::Nat),
            Op::Nil | Op::Cons | Op::Rest | Op::Append | Op::Filter | Op::PivotRec => Some(Sort::ListNat),
            Op::Lt => Some(Sort::Bool),
            Op::If | Op::Var(_) => None,
        }
    }

    /// Sorts of the arguments when the node is used at sort `result`.
    pub fn arg_sorts(self, result: Sort) -> Vec<Sort> {
        use Sort::*;
        match self {
            Op::Zero | Op::Nil | Op::Var(_) => vec![],
            Op::Succ => vec![Nat],
            Op::Add | Op::Mul | Op::Lt => vec![Nat, Nat],
            Op::PrecNat => vec![Nat, Nat, Nat],
            Op::Cons => vec![Nat, ListNat],
            Op::First | Op::Rest | Op::Len => vec![ListNat],
            Op::Append => vec![ListNat, ListNat],
            Op::If => vec![Bool, result, result],
            Op::Filter => vec![ListNat, Bool],
            Op::PivotRec => vec![ListNat, Bool, Bool, ListNat],
        }
    }

    /// Variables bound over argument `i`.
    pub fn binders(self, i: usize) -> &'static [Var] {
        match (self, i) {
            (Op::PrecNat, 1) => &[Var::Acc, Var::Idx],
            (Op::Filter, 1) => &[Var::X],
            (Op::PivotRec, 1) | (Op::PivotRec, 2) => &[Var::X, Var::Pivot],
            (Op::PivotRec, 3) => &[Var::L, Var::Pivot, Var::R],
            _ => &[],
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A kernel term. Subterms are shared, so cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Term {
    op: Op,
    args: Arc<[Term]>,
}

impl Term {
    /// Builds a node, checking only the arity.
    pub fn new(op: Op, args: Vec<Term>) -> Term {
        assert_eq!(op.arity(), args.len(), "wrong arity for {op}");
        Term { op, args: args.into() }
    }

    pub fn op(&self) -> Op {
        self.op
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn arg(&self, i: usize) -> &Term {
        &self.args[i]
    }

    pub fn var(v: Var) -> Term {
        Term::new(Op::Var(v), vec![])
    }

    pub fn n() -> Term {
        Term::var(Var::N)
    }

    pub fn zero() -> Term {
        Term::new(Op::Zero, vec![])
    }

    pub fn nil() -> Term {
        Term::new(Op::Nil, vec![])
    }

    pub fn succ(t: Term) -> Term {
        Term::new(Op::Succ, vec![t])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Term, b: Term) -> Term {
        Term::new(Op::Add, vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Term, b: Term) -> Term {
        Term::new(Op::Mul, vec![a, b])
    }

    pub fn precnat(base: Term, step: Term, target: Term) -> Term {
        Term::new(Op::PrecNat, vec![base, step, target])
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::new(Op::Cons, vec![head, tail])
    }

    pub fn first(l: Term) -> Term {
        Term::new(Op::First, vec![l])
    }

    pub fn rest(l: Term) -> Term {
        Term::new(Op::Rest, vec![l])
    }

    pub fn append(a: Term, b: Term) -> Term {
        Term::new(Op::Append, vec![a, b])
    }

    pub fn len(l: Term) -> Term {
        Term::new(Op::Len, vec![l])
    }

    pub fn lt(a: Term, b: Term) -> Term {
        Term::new(Op::Lt, vec![a, b])
    }

    pub fn ite(c: Term, t: Term, e: Term) -> Term {
        Term::new(Op::If, vec![c, t, e])
    }

    pub fn filter(list: Term, pred: Term) -> Term {
        Term::new(Op::Filter, vec![list, pred])
    }

    pub fn pivotrec(list: Term, pred_left: Term, pred_right: Term, combine: Term) -> Term {
        Term::new(Op::PivotRec, vec![list, pred_left, pred_right, combine])
    }

    /// Node count, variable occurrences included.
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    /// Pre-order sequence of ranks. Same-size terms are ordered by
    /// comparing these sequences lexicographically.
    pub fn ranks(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.size());
        self.push_ranks(&mut out);
        out
    }

    fn push_ranks(&self, out: &mut Vec<u8>) {
        out.push(self.op.rank());
        for a in self.args.iter() {
            a.push_ranks(out);
        }
    }

    /// Rebuilds a term from its pre-order rank sequence.
    pub fn from_ranks(ranks: &[u8]) -> Option<Term> {
        let mut pos = 0;
        let t = Term::decode(ranks, &mut pos)?;
        (pos == ranks.len()).then_some(t)
    }

    fn decode(ranks: &[u8], pos: &mut usize) -> Option<Term> {
        let op = Op::from_rank(*ranks.get(*pos)?)?;
        *pos += 1;
        let args = (0..op.arity())
            .map(|_| Term::decode(ranks, pos))
            .collect::<Option<Vec<_>>>()?;
        Some(Term::new(op, args))
    }

    /// Every label occurring in the term.
    pub fn ops(&self) -> Vec<Op> {
        let mut out = vec![self.op];
        for a in self.args.iter() {
            out.extend(a.ops());
        }
        out
    }
}

/// Canonical order: size first, then pre-order ranks.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.ranks().cmp(&other.ranks()))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            return f.write_str(self.op.name());
        }
        write!(f, "({}", self.op.name())?;
        for a in self.args.iter() {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
