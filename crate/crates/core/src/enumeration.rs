//! Canonical enumeration of well-formed programs.
//!
//! Programs are ordered by size, then by the lexicographic order of their
//! pre-order rank sequences, and numbered from 1. Counting completions of
//! partial pre-order sequences gives both directions of the bijection
//! without materializing the stream: [`Enumeration::program_at`] walks the
//! sequence choosing one rank at a time, [`Enumeration::index_of`] sums the
//! counts of the ranks it skips.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::kernel::{check_well_formed, Op, Signature, Sort, Term, TypedProgram, Var};

/// A family of programs to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tier {
    /// `zero`, `succ`, `add`, `mul`, `precnat` over the input `n : nat`.
    NatFn,
    /// Every constructor; programs still map `n : nat` to a `nat`.
    Full,
}

impl Tier {
    pub fn grammar(self) -> Grammar {
        let sig = Signature::input(Sort::Nat);
        match self {
            Tier::NatFn => Grammar::new(
                [Op::Zero, Op::Succ, Op::Add, Op::Mul, Op::PrecNat].map(|op| (op, Sort::Nat)),
                Sort::Nat,
                sig,
            ),
            Tier::Full => Grammar::full(Sort::Nat, sig),
        }
    }

    /// Shared enumeration for this tier; its counting tables persist for
    /// the life of the process.
    pub fn enumeration(self) -> Arc<Enumeration> {
        static NATFN: OnceLock<Arc<Enumeration>> = OnceLock::new();
        static FULL: OnceLock<Arc<Enumeration>> = OnceLock::new();
        let cell = match self {
            Tier::NatFn => &NATFN,
            Tier::Full => &FULL,
        };
        cell.get_or_init(|| Arc::new(Enumeration::new(self.grammar()))).clone()
    }

    pub fn name(self) -> &'static str {
        match self {
            Tier::NatFn => "natfn",
            Tier::Full => "full",
        }
    }
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natfn" => Ok(Tier::NatFn),
            "full" => Ok(Tier::Full),
            other => Err(format!("unknown tier `{other}` (expected natfn or full)")),
        }
    }
}

impl std::fmt::Display for Tier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which constructors may appear at which sort, the root sort, and the
/// free variables of the root. Variables are always available where they
/// are in scope.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grammar {
    allowed: [u32; 3],
    root: Sort,
    signature: Signature,
}

impl Grammar {
    pub fn new(productions: impl IntoIterator<Item = (Op, Sort)>, root: Sort, signature: Signature) -> Grammar {
        let mut allowed = [0u32; 3];
        for (op, sort) in productions {
            if !matches!(op, Op::Var(_)) {
                allowed[sort.index()] |= 1 << op.rank();
            }
        }
        for (v, s) in signature.entries() {
            if let Some(fixed) = v.bound_sort() {
                assert_eq!(fixed, *s, "variable `{}` has fixed sort {fixed}", v.name());
            }
        }
        Grammar {
            allowed,
            root,
            signature,
        }
    }

    /// Every constructor at its result sort, `if` at every sort.
    pub fn full(root: Sort, signature: Signature) -> Grammar {
        let productions = Op::ALL.into_iter().flat_map(|op| match op.result_sort() {
            Some(s) => vec![(op, s)],
            None if op == Op::If => Sort::ALL.iter().map(|&s| (Op::If, s)).collect(),
            None => vec![],
        });
        Grammar::new(productions, root, signature)
    }

    pub fn allows(&self, op: Op, sort: Sort) -> bool {
        self.allowed[sort.index()] & (1 << op.rank()) != 0
    }

    pub fn root(&self) -> Sort {
        self.root
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Same productions, different root.
    pub fn rooted(&self, root: Sort, signature: Signature) -> Grammar {
        Grammar {
            allowed: self.allowed,
            root,
            signature,
        }
    }

    fn var_sort(&self, v: Var) -> Option<Sort> {
        v.bound_sort().or_else(|| self.signature.lookup(v))
    }

    fn root_hole(&self) -> Hole {
        let scope = self.signature.entries().iter().fold(0, |m, (v, _)| m | v.bit());
        Hole { sort: self.root, scope }
    }

    /// Labels that may fill a hole, in rank order.
    fn candidates(&self, h: Hole) -> impl Iterator<Item = Op> + '_ {
        Op::ALL.into_iter().filter(move |&op| match op {
            Op::Var(v) => h.scope & v.bit() != 0 && self.var_sort(v) == Some(h.sort),
            _ => self.allows(op, h.sort),
        })
    }

    /// Whether every label of `t` is a production of this grammar.
    pub fn admits(&self, t: &Term, sort: Sort) -> bool {
        if let Op::Var(_) = t.op() {
            return true;
        }
        if !self.allows(t.op(), sort) {
            return false;
        }
        t.op()
            .arg_sorts(sort)
            .into_iter()
            .enumerate()
            .all(|(i, s)| self.admits(t.arg(i), s))
    }
}

/// A position awaiting a subterm: its sort and the variables in scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Hole {
    sort: Sort,
    scope: u8,
}

fn child_holes(op: Op, h: Hole) -> impl Iterator<Item = Hole> {
    op.arg_sorts(h.sort).into_iter().enumerate().map(move |(i, sort)| Hole {
        sort,
        scope: op.binders(i).iter().fold(h.scope, |m, v| m | v.bit()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("program indices start at 1")]
    IndexZero,
    #[error("index {0} is past the end of a finite enumeration")]
    OutOfRange(u64),
    #[error("not in tier: {0}")]
    NotInTier(String),
}

/// Number of ways to fill a sequence of holes with exactly `r` nodes.
/// Counts saturate; indices are `u64`, so saturation never changes a
/// comparison against one.
type Memo = HashMap<MemoKey, u128>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum MemoKey {
    /// Up to 14 holes at 9 bits each.
    Packed(u128, u8, u16),
    Long(Vec<Hole>, usize),
}

impl Hole {
    fn bits(self) -> u128 {
        ((self.sort.index() as u128) << 7) | self.scope as u128
    }
}

fn memo_key(holes: &[Hole], r: usize) -> MemoKey {
    if holes.len() <= 14 && r <= u16::MAX as usize {
        let packed = holes.iter().fold(0u128, |acc, h| (acc << 9) | h.bits());
        MemoKey::Packed(packed, holes.len() as u8, r as u16)
    } else {
        MemoKey::Long(holes.to_vec(), r)
    }
}

fn count_list(g: &Grammar, memo: &mut Memo, holes: &[Hole], r: usize) -> u128 {
    if holes.is_empty() {
        return (r == 0) as u128;
    }
    if r < holes.len() {
        return 0;
    }
    let key = memo_key(holes, r);
    if let Some(&c) = memo.get(&key) {
        return c;
    }
    let total = if holes.len() == 1 {
        let h = holes[0];
        let cands: Vec<Op> = g.candidates(h).collect();
        cands.into_iter().fold(0u128, |acc, op| {
            let kids: Vec<Hole> = child_holes(op, h).collect();
            acc.saturating_add(count_list(g, memo, &kids, r - 1))
        })
    } else {
        let rest = &holes[1..];
        let mut acc = 0u128;
        for a in 1..=(r - rest.len()) {
            let head = count_list(g, memo, &holes[..1], a);
            if head == 0 {
                continue;
            }
            let tail = count_list(g, memo, rest, r - a);
            acc = acc.saturating_add(head.saturating_mul(tail));
        }
        acc
    };
    memo.insert(key, total);
    total
}

/// Enumeration of every well-formed term a grammar generates at its root.
#[derive(Debug)]
pub struct Enumeration {
    grammar: Grammar,
    memo: Mutex<Memo>,
}

impl Enumeration {
    pub fn new(grammar: Grammar) -> Enumeration {
        Enumeration {
            grammar,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    fn with_memo<T>(&self, f: impl FnOnce(&Grammar, &mut Memo) -> T) -> T {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        f(&self.grammar, &mut memo)
    }

    /// Number of programs of exactly `size` nodes.
    pub fn count_of_size(&self, size: usize) -> u128 {
        let root = self.grammar.root_hole();
        self.with_memo(|g, m| count_list(g, m, &[root], size))
    }

    /// The largest size a finite language can reach is bounded by this;
    /// searches for a size class give up past it.
    const MAX_SIZE: usize = 256;

    fn wrap(&self, term: Term) -> TypedProgram {
        TypedProgram::trusted(term, self.grammar.signature.clone(), self.grammar.root)
    }

    /// The `i`-th program, counting from 1.
    pub fn program_at(&self, i: u64) -> Result<TypedProgram, EnumError> {
        if i == 0 {
            return Err(EnumError::IndexZero);
        }
        let mut offset = (i - 1) as u128;
        for size in 1..=Self::MAX_SIZE {
            let c = self.count_of_size(size);
            if offset < c {
                return Ok(self.wrap(self.unrank(size, offset)));
            }
            offset -= c;
        }
        Err(EnumError::OutOfRange(i))
    }

    /// The `k`-th program (from 0) among those of exactly `size` nodes.
    fn unrank(&self, size: usize, mut k: u128) -> Term {
        self.with_memo(|g, memo| {
            let mut stack = vec![g.root_hole()];
            let mut remaining = size;
            let mut ranks = Vec::with_capacity(size);
            while let Some(h) = stack.first().copied() {
                let mut chosen = None;
                for op in g.candidates(h) {
                    let mut next: Vec<Hole> = child_holes(op, h).collect();
                    next.extend_from_slice(&stack[1..]);
                    let c = count_list(g, memo, &next, remaining - 1);
                    if k < c {
                        chosen = Some((op, next));
                        break;
                    }
                    k -= c;
                }
                let (op, next) = chosen.expect("rank within the size class");
                ranks.push(op.rank());
                remaining -= 1;
                stack = next;
            }
            Term::from_ranks(&ranks).expect("pre-order walk yields a complete term")
        })
    }

    /// Position of `p` in the enumeration.
    pub fn index_of(&self, t: &Term) -> Result<u64, EnumError> {
        check_well_formed(t, self.grammar.root, &self.grammar.signature)
            .map_err(|e| EnumError::NotInTier(e.to_string()))?;
        if !self.grammar.admits(t, self.grammar.root) {
            return Err(EnumError::NotInTier(format!(
                "`{t}` uses a constructor outside the grammar"
            )));
        }
        let size = t.size();
        let before: u128 = (1..size).map(|s| self.count_of_size(s)).fold(0, u128::saturating_add);
        let within = self.rank_within(t);
        let idx = before.saturating_add(within).saturating_add(1);
        u64::try_from(idx).map_err(|_| EnumError::NotInTier(format!("index of `{t}` exceeds u64")))
    }

    fn rank_within(&self, t: &Term) -> u128 {
        let ranks = t.ranks();
        self.with_memo(|g, memo| {
            let mut stack = vec![g.root_hole()];
            let mut remaining = ranks.len();
            let mut k = 0u128;
            for &r in &ranks {
                let h = stack[0];
                let mut next_stack = None;
                for op in g.candidates(h) {
                    let mut next: Vec<Hole> = child_holes(op, h).collect();
                    next.extend_from_slice(&stack[1..]);
                    if op.rank() == r {
                        next_stack = Some(next);
                        break;
                    }
                    k = k.saturating_add(count_list(g, memo, &next, remaining - 1));
                }
                stack = next_stack.expect("well-formed term only uses admissible labels");
                remaining -= 1;
            }
            k
        })
    }

    /// Every program of exactly `size` nodes, in enumeration order.
    pub fn programs_of_size(&self, size: usize) -> Vec<Term> {
        let c = self.count_of_size(size);
        let c = usize::try_from(c).expect("size class fits in memory");
        (0..c as u128).map(|k| self.unrank(size, k)).collect()
    }
}

/// Convenience wrappers over a tier's shared enumeration.
pub fn program_at(tier: Tier, i: u64) -> Result<TypedProgram, EnumError> {
    tier.enumeration().program_at(i)
}

pub fn index_of(tier: Tier, p: &Term) -> Result<u64, EnumError> {
    tier.enumeration().index_of(p)
}

/// One pending choice of the depth-first walk over pre-order sequences.
#[derive(Debug, Clone)]
struct Frame {
    holes: Vec<Hole>,
    remaining: usize,
    choice: usize,
}

/// Cursor over an enumeration: yields `(index, program)` from index 1 on.
///
/// Within a size class the cursor walks rank sequences depth first,
/// reusing the common prefix of consecutive programs, so a step costs a
/// few completion counts instead of a full unranking.
#[derive(Debug, Clone)]
pub struct EnumCursor {
    enumeration: Arc<Enumeration>,
    next_index: u64,
    size: usize,
    frames: Vec<Frame>,
    ranks: Vec<u8>,
}

impl EnumCursor {
    pub fn new(enumeration: Arc<Enumeration>) -> EnumCursor {
        EnumCursor {
            enumeration,
            next_index: 1,
            size: 0,
            frames: Vec::new(),
            ranks: Vec::new(),
        }
    }

    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// Tries candidates of frame `depth` from position `from` on; on
    /// success records the choice and pushes the successor frame.
    fn choose(g: &Grammar, memo: &mut Memo, frames: &mut Vec<Frame>, ranks: &mut Vec<u8>, from: usize) -> bool {
        let frame = frames.last().expect("frame to choose in").clone();
        let h = frame.holes[0];
        for (pos, op) in g.candidates(h).enumerate().skip(from) {
            let mut next: Vec<Hole> = child_holes(op, h).collect();
            next.extend_from_slice(&frame.holes[1..]);
            if count_list(g, memo, &next, frame.remaining - 1) > 0 {
                frames.last_mut().expect("frame").choice = pos;
                ranks.push(op.rank());
                frames.push(Frame {
                    holes: next,
                    remaining: frame.remaining - 1,
                    choice: 0,
                });
                return true;
            }
        }
        false
    }

    /// Extends the current prefix with the smallest feasible completion.
    fn descend(g: &Grammar, memo: &mut Memo, frames: &mut Vec<Frame>, ranks: &mut Vec<u8>) {
        while !frames.last().expect("frame").holes.is_empty() {
            let ok = Self::choose(g, memo, frames, ranks, 0);
            debug_assert!(ok, "feasible frames always have a completion");
        }
    }

    /// Moves to the next sequence of the current size class.
    fn advance(&mut self, g: &Grammar, memo: &mut Memo) -> bool {
        // drop the terminal frame, then retry choices from the deepest one
        self.frames.pop();
        while let Some(frame) = self.frames.last() {
            let from = frame.choice + 1;
            self.ranks.pop();
            if Self::choose(g, memo, &mut self.frames, &mut self.ranks, from) {
                Self::descend(g, memo, &mut self.frames, &mut self.ranks);
                return true;
            }
            self.frames.pop();
        }
        false
    }

    fn start_size(&mut self, g: &Grammar, memo: &mut Memo) -> bool {
        let root = g.root_hole();
        self.ranks.clear();
        self.frames.clear();
        if count_list(g, memo, &[root], self.size) == 0 {
            return false;
        }
        self.frames.push(Frame {
            holes: vec![root],
            remaining: self.size,
            choice: 0,
        });
        Self::descend(g, memo, &mut self.frames, &mut self.ranks);
        true
    }
}

impl Iterator for EnumCursor {
    type Item = (u64, TypedProgram);

    fn next(&mut self) -> Option<Self::Item> {
        let enumeration = self.enumeration.clone();
        let found = enumeration.with_memo(|g, memo| {
            if !self.frames.is_empty() && self.advance(g, memo) {
                return true;
            }
            loop {
                self.size += 1;
                if self.size > Enumeration::MAX_SIZE {
                    return false;
                }
                if self.start_size(g, memo) {
                    return true;
                }
            }
        });
        if !found {
            self.frames.clear();
            return None;
        }
        let t = Term::from_ranks(&self.ranks).expect("complete pre-order sequence");
        let i = self.next_index;
        self.next_index += 1;
        Some((i, enumeration.wrap(t)))
    }
}

/// The unbounded, ordered stream of a tier's programs.
pub fn enumerate_stream(tier: Tier) -> EnumCursor {
    EnumCursor::new(tier.enumeration())
}
