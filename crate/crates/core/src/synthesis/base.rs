use std::collections::BTreeSet;

use thiserror::Error;

use crate::enumeration::Grammar;
use crate::kernel::{Op, Signature, Sort};

/// Refinements a component fact may carry beyond its domain and range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Refinement {
    /// The result is an element of list argument `i` (when it is non-empty).
    ResultElemOfArg(usize),
    /// The component is a strict order on naturals.
    StrictOrderPredicate,
    /// Recursion happens only on sublists of the tail, so any predicates
    /// keep it total.
    PivotSafe,
}

/// One entry of the reflection base: a kernel component at a signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentFact {
    pub component: Op,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
    pub refinements: BTreeSet<Refinement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaseError {
    #[error("reflection base is empty")]
    Empty,
    #[error("`{component}` does not have signature {args:?} -> {result}")]
    SignatureMismatch {
        component: Op,
        args: Vec<Sort>,
        result: Sort,
    },
    #[error("refinement {refinement:?} does not apply to `{component}`")]
    BadRefinement { component: Op, refinement: Refinement },
    #[error("`{0}` is not a literal")]
    NotALiteral(Op),
    #[error("reflection base lacks a fact the schema needs: {0}")]
    MissingFact(&'static str),
}

impl ComponentFact {
    pub fn new(component: Op, result_sort: Sort, refinements: impl IntoIterator<Item = Refinement>) -> ComponentFact {
        ComponentFact {
            component,
            arg_sorts: component.arg_sorts(result_sort),
            result_sort,
            refinements: refinements.into_iter().collect(),
        }
    }

    fn validate(&self) -> Result<(), BaseError> {
        let op = self.component;
        let mismatch = || BaseError::SignatureMismatch {
            component: op,
            args: self.arg_sorts.clone(),
            result: self.result_sort,
        };
        if matches!(op, Op::Var(_)) || op.arity() == 0 {
            return Err(mismatch());
        }
        if op.result_sort().is_some_and(|s| s != self.result_sort) || op.arg_sorts(self.result_sort) != self.arg_sorts {
            return Err(mismatch());
        }
        for &r in &self.refinements {
            let ok = match r {
                Refinement::ResultElemOfArg(i) => {
                    self.result_sort == Sort::Nat && self.arg_sorts.get(i) == Some(&Sort::ListNat)
                }
                Refinement::StrictOrderPredicate => op == Op::Lt,
                Refinement::PivotSafe => op == Op::PivotRec,
            };
            if !ok {
                return Err(BaseError::BadRefinement {
                    component: op,
                    refinement: r,
                });
            }
        }
        Ok(())
    }
}

/// Components plus literal constants that synthesis may build from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionBase {
    components: Vec<ComponentFact>,
    literals: Vec<Op>,
}

impl ReflectionBase {
    pub fn new(components: Vec<ComponentFact>, literals: Vec<Op>) -> Result<ReflectionBase, BaseError> {
        if components.is_empty() && literals.is_empty() {
            return Err(BaseError::Empty);
        }
        for c in &components {
            c.validate()?;
        }
        if let Some(&bad) = literals.iter().find(|op| !matches!(op, Op::Zero | Op::Nil)) {
            return Err(BaseError::NotALiteral(bad));
        }
        Ok(ReflectionBase { components, literals })
    }

    /// `zero`, `succ`, `add`, `mul` and `precnat`: the natfn tier.
    pub fn arithmetic() -> ReflectionBase {
        let components = [Op::Succ, Op::Add, Op::Mul, Op::PrecNat]
            .into_iter()
            .map(|op| ComponentFact::new(op, Sort::Nat, []))
            .collect();
        ReflectionBase::new(components, vec![Op::Zero]).expect("arithmetic base is valid")
    }

    /// Every kernel component, with the refinements the kernel guarantees.
    pub fn kernel() -> ReflectionBase {
        let mut components = Vec::new();
        for op in Op::ALL {
            if op.arity() == 0 {
                continue;
            }
            let refinements: Vec<Refinement> = match op {
                Op::First => vec![Refinement::ResultElemOfArg(0)],
                Op::Lt => vec![Refinement::StrictOrderPredicate],
                Op::PivotRec => vec![Refinement::PivotSafe],
                _ => vec![],
            };
            match op.result_sort() {
                Some(s) => components.push(ComponentFact::new(op, s, refinements)),
                None => {
                    for s in Sort::ALL {
                        components.push(ComponentFact::new(op, s, refinements.clone()));
                    }
                }
            }
        }
        ReflectionBase::new(components, vec![Op::Zero, Op::Nil]).expect("kernel base is valid")
    }

    pub fn components(&self) -> &[ComponentFact] {
        &self.components
    }

    pub fn literals(&self) -> &[Op] {
        &self.literals
    }

    pub fn has(&self, op: Op, refinement: Option<Refinement>) -> bool {
        self.components
            .iter()
            .any(|c| c.component == op && refinement.is_none_or(|r| c.refinements.contains(&r)))
    }

    /// The productions these facts license, rooted at `root` under `sig`.
    pub fn grammar(&self, root: Sort, sig: Signature) -> Grammar {
        let literals = self
            .literals
            .iter()
            .map(|&op| (op, op.result_sort().expect("literal sort")));
        let components = self.components.iter().map(|c| (c.component, c.result_sort));
        Grammar::new(literals.chain(components).collect::<Vec<_>>(), root, sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_bases_validate() {
        let k = ReflectionBase::kernel();
        assert!(k.has(Op::First, Some(Refinement::ResultElemOfArg(0))));
        assert!(k.has(Op::Lt, Some(Refinement::StrictOrderPredicate)));
        assert!(k.has(Op::PivotRec, Some(Refinement::PivotSafe)));
        assert!(!ReflectionBase::arithmetic().has(Op::Lt, None));
    }

    #[test]
    fn rejects_bad_facts() {
        let wrong = ComponentFact {
            component: Op::Succ,
            arg_sorts: vec![Sort::ListNat],
            result_sort: Sort::Nat,
            refinements: BTreeSet::new(),
        };
        assert!(matches!(
            ReflectionBase::new(vec![wrong], vec![]),
            Err(BaseError::SignatureMismatch { .. })
        ));
        let bad_ref = ComponentFact::new(Op::Add, Sort::Nat, [Refinement::StrictOrderPredicate]);
        assert!(matches!(
            ReflectionBase::new(vec![bad_ref], vec![]),
            Err(BaseError::BadRefinement { .. })
        ));
        let elem = ComponentFact::new(Op::Len, Sort::Nat, [Refinement::ResultElemOfArg(1)]);
        assert!(ReflectionBase::new(vec![elem], vec![]).is_err());
        assert_eq!(ReflectionBase::new(vec![], vec![]), Err(BaseError::Empty));
        assert_eq!(
            ReflectionBase::new(vec![], vec![Op::Succ]),
            Err(BaseError::NotALiteral(Op::Succ))
        );
    }

    #[test]
    fn grammar_follows_facts() {
        let g = ReflectionBase::arithmetic().grammar(Sort::Nat, Signature::input(Sort::Nat));
        assert!(g.allows(Op::Succ, Sort::Nat));
        assert!(g.allows(Op::Zero, Sort::Nat));
        assert!(!g.allows(Op::Nil, Sort::ListNat));
        assert!(!g.allows(Op::If, Sort::Nat));
    }
}
