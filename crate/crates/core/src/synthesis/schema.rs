use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::kernel::{eval, EvalBudget, EvalError, Op, Signature, Sort, Term, TypedProgram, Value, Var};

use super::base::{BaseError, Refinement, ReflectionBase};
use super::goal::{lists_up_to, GoalSpec};
use super::pool::{bottom_up_pool, single_input_probes, Candidate, Probe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    /// The cheapest pool term that matches every example.
    BottomUp,
    /// `(pivotrec n predLeft predRight combine)` with the three holes
    /// filled from pools over their binder signatures.
    PivotDC,
}

impl Schema {
    pub fn name(self) -> &'static str {
        match self {
            Schema::BottomUp => "bottomup",
            Schema::PivotDC => "pivotdc",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Schema, String> {
        match s {
            "bottomup" => Ok(Schema::BottomUp),
            "pivotdc" => Ok(Schema::PivotDC),
            _ => Err(format!("unknown schema `{s}` (expected bottomup or pivotdc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error(transparent)]
    ResourceExhausted(#[from] EvalError),
    #[error(transparent)]
    InvalidBase(#[from] BaseError),
    #[error("pivotdc needs list -> list examples, got {0} -> {1}")]
    SchemaSort(Sort, Sort),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthOutcome {
    Found {
        program: TypedProgram,
        /// Size of the program, or the summed hole sizes for a schema.
        cost: usize,
        /// Candidates or fillings checked against the examples.
        tried: usize,
    },
    NotFound {
        tried: usize,
    },
}

impl SynthOutcome {
    pub fn program(&self) -> Option<&TypedProgram> {
        match self {
            SynthOutcome::Found { program, .. } => Some(program),
            SynthOutcome::NotFound { .. } => None,
        }
    }
}

/// Three hole terms for the divide-and-conquer schema.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filling {
    pub pred_left: Candidate,
    pub pred_right: Candidate,
    pub combine: Candidate,
}

impl Filling {
    pub fn cost(&self) -> usize {
        self.pred_left.cost + self.pred_right.cost + self.combine.cost
    }

    /// `(pivotrec n predLeft predRight combine)` over `n : list`.
    pub fn assemble(&self) -> TypedProgram {
        let term = Term::pivotrec(
            Term::n(),
            self.pred_left.term().clone(),
            self.pred_right.term().clone(),
            self.combine.term().clone(),
        );
        TypedProgram::trusted(term, Signature::input(Sort::ListNat), Sort::ListNat)
    }
}

pub fn predicate_signature() -> Signature {
    Signature::binders(Op::PivotRec.binders(1))
}

pub fn combine_signature() -> Signature {
    Signature::binders(Op::PivotRec.binders(3))
}

/// Every natural that occurs in the goal's examples or probes.
fn goal_naturals(goal: &GoalSpec) -> Vec<u64> {
    let mut out = BTreeSet::new();
    let mut add = |v: &Value| {
        let nats: Vec<BigUint> = match v {
            Value::Nat(n) => vec![n.clone()],
            Value::List(l) => l.clone(),
            Value::Bool(_) => vec![],
        };
        for n in nats {
            if let Ok(n) = u64::try_from(n) {
                out.insert(n);
            }
        }
    };
    for (i, o) in goal.examples() {
        add(i);
        add(o);
    }
    goal.probes().iter().for_each(&mut add);
    out.into_iter().collect()
}

/// Environments `(x, pivot)` over the goal's naturals.
pub fn predicate_probes(goal: &GoalSpec) -> Vec<Probe> {
    let d = goal_naturals(goal);
    let mut out = Vec::new();
    for &x in &d {
        for &p in &d {
            out.push(vec![Value::nat(x), Value::nat(p)]);
        }
    }
    out
}

/// Environments `(l, pivot, r)`: lists of length at most 2 over the goal's
/// naturals on both sides of each pivot.
pub fn combine_probes(goal: &GoalSpec) -> Vec<Probe> {
    let d = goal_naturals(goal);
    let lists = lists_up_to(2, &d);
    let mut out = Vec::new();
    for l in &lists {
        for &p in &d {
            for r in &lists {
                out.push(vec![l.clone(), Value::nat(p), r.clone()]);
            }
        }
    }
    out
}

/// Hole fillings in non-decreasing total cost; fillings of equal cost come
/// in the canonical order of the assembled program.
pub struct Fillings<'a> {
    pools: [&'a [Candidate]; 3],
    /// Start offset of each cost within each pool, indexed by cost.
    offsets: [Vec<usize>; 3],
    total: usize,
    max_total: usize,
    batch: std::vec::IntoIter<[usize; 3]>,
}

impl<'a> Fillings<'a> {
    fn new(pred_left: &'a [Candidate], pred_right: &'a [Candidate], combine: &'a [Candidate]) -> Fillings<'a> {
        let pools = [pred_left, pred_right, combine];
        let max_cost = pools.iter().flat_map(|p| p.iter().map(|c| c.cost)).max().unwrap_or(0);
        let offsets = pools.map(|pool| {
            debug_assert!(pool.windows(2).all(|w| w[0].cost <= w[1].cost));
            (0..=max_cost + 1)
                .map(|c| pool.partition_point(|x| x.cost < c))
                .collect()
        });
        Fillings {
            pools,
            offsets,
            total: 0,
            max_total: 3 * max_cost,
            batch: Vec::new().into_iter(),
        }
    }

    /// Pool positions of every filling of the current total cost.
    fn fill_batch(&self) -> Vec<[usize; 3]> {
        let t = self.total;
        let mut batch = Vec::new();
        for a in 1..t {
            for b in 1..t - a {
                let c = t - a - b;
                let range = |hole: usize, cost: usize| {
                    let o = &self.offsets[hole];
                    if cost + 1 >= o.len() {
                        0..0
                    } else {
                        o[cost]..o[cost + 1]
                    }
                };
                for l in range(0, a) {
                    for r in range(1, b) {
                        for k in range(2, c) {
                            batch.push([l, r, k]);
                        }
                    }
                }
            }
        }
        let ranks = |ix: &[usize; 3]| {
            let mut v = self.pools[0][ix[0]].term().ranks();
            v.extend(self.pools[1][ix[1]].term().ranks());
            v.extend(self.pools[2][ix[2]].term().ranks());
            v
        };
        batch.sort_by_cached_key(ranks);
        batch
    }
}

impl Iterator for Fillings<'_> {
    type Item = Filling;

    fn next(&mut self) -> Option<Filling> {
        loop {
            if let Some([l, r, k]) = self.batch.next() {
                return Some(Filling {
                    pred_left: self.pools[0][l].clone(),
                    pred_right: self.pools[1][r].clone(),
                    combine: self.pools[2][k].clone(),
                });
            }
            if self.total >= self.max_total {
                return None;
            }
            self.total += 1;
            self.batch = self.fill_batch().into_iter();
        }
    }
}

/// Pools are the predicate, predicate and combine candidate lists, each in
/// cost order as [`bottom_up_pool`] returns them.
pub fn fill_schema_holes<'a>(
    pred_left: &'a [Candidate],
    pred_right: &'a [Candidate],
    combine: &'a [Candidate],
) -> Fillings<'a> {
    Fillings::new(pred_left, pred_right, combine)
}

fn satisfies(p: &TypedProgram, goal: &GoalSpec, budget: EvalBudget) -> Result<bool, EvalError> {
    for (input, output) in goal.examples() {
        if &eval(p, input, budget)? != output {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Search within `max_size` per hole (or for the whole program, for
/// [`Schema::BottomUp`]).
pub fn synthesize(
    base: &ReflectionBase,
    goal: &GoalSpec,
    schema: Schema,
    max_size: usize,
    budget: EvalBudget,
) -> Result<SynthOutcome, SynthError> {
    let max_size = max_size.max(1);
    match schema {
        Schema::BottomUp => {
            let sig = Signature::input(goal.input_sort());
            let probes = single_input_probes(goal.probes());
            let pool = bottom_up_pool(base, &sig, goal.output_sort(), &probes, max_size, budget)?;
            let mut tried = 0;
            for c in pool {
                tried += 1;
                if satisfies(&c.program, goal, budget)? {
                    return Ok(SynthOutcome::Found {
                        cost: c.cost,
                        program: c.program,
                        tried,
                    });
                }
            }
            Ok(SynthOutcome::NotFound { tried })
        }
        Schema::PivotDC => {
            if !base.has(Op::PivotRec, Some(Refinement::PivotSafe)) {
                return Err(BaseError::MissingFact("pivotrec with PivotSafe").into());
            }
            if goal.input_sort() != Sort::ListNat || goal.output_sort() != Sort::ListNat {
                return Err(SynthError::SchemaSort(goal.input_sort(), goal.output_sort()));
            }
            let preds = bottom_up_pool(
                base,
                &predicate_signature(),
                Sort::Bool,
                &predicate_probes(goal),
                max_size,
                budget,
            )?;
            let combines = bottom_up_pool(
                base,
                &combine_signature(),
                Sort::ListNat,
                &combine_probes(goal),
                max_size,
                budget,
            )?;
            let mut tried = 0;
            for f in fill_schema_holes(&preds, &preds, &combines) {
                tried += 1;
                let program = f.assemble();
                if satisfies(&program, goal, budget)? {
                    return Ok(SynthOutcome::Found {
                        cost: f.cost(),
                        program,
                        tried,
                    });
                }
            }
            Ok(SynthOutcome::NotFound { tried })
        }
    }
}

/// The holes of a program assembled by [`Schema::PivotDC`].
pub fn pivot_holes(p: &Term) -> Option<(&Term, &Term, &Term)> {
    match (p.op(), p.args()) {
        (Op::PivotRec, [list, l, r, c]) if list.op() == Op::Var(Var::N) => Some((l, r, c)),
        _ => None,
    }
}
