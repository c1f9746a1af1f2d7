//! Bottom-up pools with observational-equivalence pruning.
//!
//! Terms are built size by size. A term is kept only if its fingerprint,
//! the vector of its values on the probe environments, is new; the first
//! term of a class under (size, pre-order ranks) becomes its
//! representative. Arguments evaluated in the probe environment itself
//! are drawn from representatives only, since swapping such an argument
//! for an equivalent one cannot change the parent's fingerprint.
//! Arguments under a binder run in environments the probes never fix, so
//! they range over every well-formed term of their size.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::enumeration::{Enumeration, Grammar};
use crate::kernel::{eval_with, EvalBudget, EvalError, Op, Signature, Sort, Term, TypedProgram, Value};

use super::base::ReflectionBase;

/// One binding of the signature's variables, in signature order.
pub type Probe = Vec<Value>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub program: TypedProgram,
    pub cost: usize,
    pub fingerprint: Vec<Value>,
}

impl Candidate {
    pub fn term(&self) -> &Term {
        self.program.term()
    }
}

/// Representatives for every sort, each list in (cost, canonical) order.
#[derive(Debug, Clone, Default)]
pub struct Pools {
    by_sort: [Vec<Candidate>; 3],
    /// Terms built and fingerprinted, pruned or not.
    pub evaluated: usize,
}

impl Pools {
    pub fn of(&self, sort: Sort) -> &[Candidate] {
        &self.by_sort[sort.index()]
    }

    pub fn into_sort(mut self, sort: Sort) -> Vec<Candidate> {
        std::mem::take(&mut self.by_sort[sort.index()])
    }
}

pub fn fingerprint(p: &TypedProgram, probes: &[Probe], budget: EvalBudget) -> Result<Vec<Value>, EvalError> {
    probes.iter().map(|probe| eval_with(p, probe, budget)).collect()
}

struct Builder<'a> {
    grammar: Grammar,
    sig: &'a Signature,
    probes: &'a [Probe],
    budget: EvalBudget,
    /// `layers[size][sort]`
    layers: Vec<[Vec<Candidate>; 3]>,
    seen: HashSet<Vec<Value>>,
    inner: HashMap<(Sort, Signature), Arc<Enumeration>>,
    inner_terms: HashMap<(Sort, Signature, usize), Arc<Vec<Term>>>,
    evaluated: usize,
}

enum ArgSource {
    Pool(Sort),
    Inner(Sort, Signature),
}

impl<'a> Builder<'a> {
    fn inner_terms(&mut self, sort: Sort, sig: &Signature, size: usize) -> Arc<Vec<Term>> {
        let key = (sort, sig.clone(), size);
        if let Some(ts) = self.inner_terms.get(&key) {
            return ts.clone();
        }
        let grammar = &self.grammar;
        let e = self
            .inner
            .entry((sort, sig.clone()))
            .or_insert_with(|| Arc::new(Enumeration::new(grammar.rooted(sort, sig.clone()))))
            .clone();
        let ts = Arc::new(e.programs_of_size(size));
        self.inner_terms.insert(key, ts.clone());
        ts
    }

    fn options(&mut self, src: &ArgSource, size: usize) -> Arc<Vec<Term>> {
        match src {
            ArgSource::Pool(sort) => Arc::new(
                self.layers[size][sort.index()]
                    .iter()
                    .map(|c| c.term().clone())
                    .collect(),
            ),
            ArgSource::Inner(sort, sig) => self.inner_terms(*sort, sig, size),
        }
    }

    fn root_ops(&self, sort: Sort) -> Vec<Op> {
        Op::ALL
            .into_iter()
            .filter(|&op| match op {
                Op::Var(v) => self.sig.lookup(v) == Some(sort),
                _ => self.grammar.allows(op, sort),
            })
            .collect()
    }

    fn build_size(&mut self, size: usize) -> Result<(), EvalError> {
        let mut fresh: HashMap<Vec<Value>, (Vec<u8>, Term, Sort)> = HashMap::new();
        for sort in Sort::ALL {
            for op in self.root_ops(sort) {
                let arity = op.arity();
                if arity == 0 {
                    if size == 1 {
                        self.offer(&mut fresh, Term::new(op, vec![]), sort)?;
                    }
                    continue;
                }
                if size < arity + 1 {
                    continue;
                }
                let sources: Vec<ArgSource> = op
                    .arg_sorts(sort)
                    .into_iter()
                    .enumerate()
                    .map(|(i, s)| match op.binders(i) {
                        [] => ArgSource::Pool(s),
                        vars => ArgSource::Inner(s, self.sig.extended(vars)),
                    })
                    .collect();
                for split in compositions(size - 1, arity) {
                    let opts: Vec<Arc<Vec<Term>>> = sources
                        .iter()
                        .zip(&split)
                        .map(|(src, &a)| self.options(src, a))
                        .collect();
                    if opts.iter().any(|o| o.is_empty()) {
                        continue;
                    }
                    let mut odometer = vec![0usize; arity];
                    loop {
                        let args = odometer.iter().zip(&opts).map(|(&i, o)| o[i].clone()).collect();
                        self.offer(&mut fresh, Term::new(op, args), sort)?;
                        if !advance(&mut odometer, &opts) {
                            break;
                        }
                    }
                }
            }
        }
        let mut layer: [Vec<Candidate>; 3] = Default::default();
        let mut entries: Vec<_> = fresh.into_iter().collect();
        entries.sort_by(|a, b| a.1 .0.cmp(&b.1 .0));
        for (fingerprint, (_, term, sort)) in entries {
            self.seen.insert(fingerprint.clone());
            layer[sort.index()].push(Candidate {
                program: TypedProgram::trusted(term, self.sig.clone(), sort),
                cost: size,
                fingerprint,
            });
        }
        self.layers.push(layer);
        Ok(())
    }

    fn offer(
        &mut self,
        fresh: &mut HashMap<Vec<Value>, (Vec<u8>, Term, Sort)>,
        term: Term,
        sort: Sort,
    ) -> Result<(), EvalError> {
        let p = TypedProgram::trusted(term, self.sig.clone(), sort);
        let fp = fingerprint(&p, self.probes, self.budget)?;
        self.evaluated += 1;
        if self.seen.contains(&fp) {
            return Ok(());
        }
        let ranks = p.term().ranks();
        match fresh.get(&fp) {
            Some((best, _, _)) if *best <= ranks => {}
            _ => {
                fresh.insert(fp, (ranks, p.into_term(), sort));
            }
        }
        Ok(())
    }
}

/// All ways to write `total` as `parts` positive summands, in
/// lexicographic order.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn advance(odometer: &mut [usize], opts: &[Arc<Vec<Term>>]) -> bool {
    for i in (0..odometer.len()).rev() {
        odometer[i] += 1;
        if odometer[i] < opts[i].len() {
            return true;
        }
        odometer[i] = 0;
    }
    false
}

/// Representatives of every sort up to `max_size`, over `sig`.
pub fn bottom_up_pools(
    base: &ReflectionBase,
    sig: &Signature,
    probes: &[Probe],
    max_size: usize,
    budget: EvalBudget,
) -> Result<Pools, EvalError> {
    assert!(!probes.is_empty(), "pools need at least one probe");
    let mut b = Builder {
        grammar: base.grammar(Sort::Nat, sig.clone()),
        sig,
        probes,
        budget,
        layers: vec![Default::default()],
        seen: HashSet::new(),
        inner: HashMap::new(),
        inner_terms: HashMap::new(),
        evaluated: 0,
    };
    for size in 1..=max_size {
        b.build_size(size)?;
    }
    let mut pools = Pools {
        evaluated: b.evaluated,
        ..Pools::default()
    };
    for layer in b.layers {
        for sort in Sort::ALL {
            pools.by_sort[sort.index()].extend(layer[sort.index()].iter().cloned());
        }
    }
    Ok(pools)
}

/// One representative per fingerprint among all well-formed terms of
/// sort `target` and size at most `max_size`.
pub fn bottom_up_pool(
    base: &ReflectionBase,
    sig: &Signature,
    target: Sort,
    probes: &[Probe],
    max_size: usize,
    budget: EvalBudget,
) -> Result<Vec<Candidate>, EvalError> {
    Ok(bottom_up_pools(base, sig, probes, max_size, budget)?.into_sort(target))
}

/// Wraps single-input probe values.
pub fn single_input_probes(values: &[Value]) -> Vec<Probe> {
    values.iter().map(|v| vec![v.clone()]).collect()
}
