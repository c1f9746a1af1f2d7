//! Big-step evaluator with a step budget.
//!
//! Every call of the recursive evaluator, including the recursive calls a
//! `pivotrec` makes on its partitions, consumes one step. Well-formed
//! programs always terminate; the budget only bounds running time. A
//! separate cap on the bit length of naturals bounds memory, since
//! `mul` inside `precnat` squares its way past any machine in a few
//! dozen iterations.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use super::term::{Op, Sort, Term, Var};
use super::typing::TypedProgram;
use super::value::Value;

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;
pub const DEFAULT_MAX_NAT_BITS: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EvalBudget {
    max_steps: u64,
    max_nat_bits: u64,
}

impl EvalBudget {
    /// Panics if `max_steps` is zero.
    pub fn new(max_steps: u64) -> EvalBudget {
        assert!(max_steps >= 1, "an evaluation budget needs at least one step");
        EvalBudget {
            max_steps,
            max_nat_bits: DEFAULT_MAX_NAT_BITS,
        }
    }

    pub fn with_max_nat_bits(mut self, bits: u64) -> EvalBudget {
        self.max_nat_bits = bits.max(1);
        self
    }

    pub fn max_steps(&self) -> u64 {
        self.max_steps
    }

    pub fn max_nat_bits(&self) -> u64 {
        self.max_nat_bits
    }
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget::new(DEFAULT_MAX_STEPS)
    }
}

/// Which limit an evaluation ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resource {
    Steps,
    NatBits,
}

impl fmt::Display for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Resource::Steps => "step budget",
            Resource::NatBits => "natural-number size cap",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("resource exhausted after {steps_used} steps ({resource})")]
    ResourceExhausted { steps_used: u64, resource: Resource },
    #[error("input mismatch: program expects {expected:?}, got {found:?}")]
    InputMismatch { expected: Vec<Sort>, found: Vec<Sort> },
}

/// Evaluates a program whose signature is the single input `n`.
pub fn eval(p: &TypedProgram, input: &Value, budget: EvalBudget) -> Result<Value, EvalError> {
    eval_with(p, std::slice::from_ref(input), budget)
}

/// Evaluates a program, binding its signature's variables in order.
pub fn eval_with(p: &TypedProgram, inputs: &[Value], budget: EvalBudget) -> Result<Value, EvalError> {
    let sig = p.signature().entries();
    if sig.len() != inputs.len() || sig.iter().zip(inputs).any(|((_, s), v)| *s != v.sort()) {
        return Err(EvalError::InputMismatch {
            expected: sig.iter().map(|(_, s)| *s).collect(),
            found: inputs.iter().map(Value::sort).collect(),
        });
    }
    let env = sig.iter().map(|(v, _)| *v).zip(inputs.iter().cloned()).collect();
    Evaluator::new(budget, env).run(p.term())
}

/// Evaluates and also reports the number of steps consumed.
pub fn eval_counted(p: &TypedProgram, input: &Value, budget: EvalBudget) -> (Result<Value, EvalError>, u64) {
    if p.signature().len() != 1 || p.signature().entries()[0].1 != input.sort() {
        return (eval(p, input, budget), 0);
    }
    let var = p.signature().entries()[0].0;
    let mut ev = Evaluator::new(budget, vec![(var, input.clone())]);
    let res = ev.run(p.term());
    (res, ev.steps)
}

struct Evaluator {
    budget: EvalBudget,
    steps: u64,
    env: Vec<(Var, Value)>,
}

impl Evaluator {
    fn new(budget: EvalBudget, env: Vec<(Var, Value)>) -> Self {
        Evaluator { budget, steps: 0, env }
    }

    fn run(&mut self, t: &Term) -> Result<Value, EvalError> {
        self.eval(t)
    }

    fn tick(&mut self) -> Result<(), EvalError> {
        if self.steps >= self.budget.max_steps {
            return Err(self.exhausted(Resource::Steps));
        }
        self.steps += 1;
        Ok(())
    }

    fn exhausted(&self, resource: Resource) -> EvalError {
        EvalError::ResourceExhausted {
            steps_used: self.steps,
            resource,
        }
    }

    fn checked(&self, n: BigUint) -> Result<BigUint, EvalError> {
        if n.bits() > self.budget.max_nat_bits {
            return Err(self.exhausted(Resource::NatBits));
        }
        Ok(n)
    }

    fn nat(&mut self, t: &Term) -> Result<BigUint, EvalError> {
        match self.eval(t)? {
            Value::Nat(n) => Ok(n),
            other => unreachable!("ill-sorted term reached the evaluator: expected nat, got {other}"),
        }
    }

    fn list(&mut self, t: &Term) -> Result<Vec<BigUint>, EvalError> {
        match self.eval(t)? {
            Value::List(l) => Ok(l),
            other => unreachable!("ill-sorted term reached the evaluator: expected list, got {other}"),
        }
    }

    fn boolean(&mut self, t: &Term) -> Result<bool, EvalError> {
        match self.eval(t)? {
            Value::Bool(b) => Ok(b),
            other => unreachable!("ill-sorted term reached the evaluator: expected bool, got {other}"),
        }
    }

    fn with_bindings<T>(
        &mut self,
        bindings: Vec<(Var, Value)>,
        f: impl FnOnce(&mut Self) -> Result<T, EvalError>,
    ) -> Result<T, EvalError> {
        let depth = self.env.len();
        self.env.extend(bindings);
        let res = f(self);
        self.env.truncate(depth);
        res
    }

    fn eval(&mut self, t: &Term) -> Result<Value, EvalError> {
        self.tick()?;
        let a = t.args();
        Ok(match t.op() {
            Op::Var(v) => self
                .env
                .iter()
                .rev()
                .find(|(w, _)| *w == v)
                .map(|(_, val)| val.clone())
                .unwrap_or_else(|| unreachable!("unbound variable `{}` reached the evaluator", v.name())),
            Op::Zero => Value::Nat(BigUint::zero()),
            Op::Succ => {
                let n = self.nat(&a[0])?;
                Value::Nat(self.checked(n + 1u32)?)
            }
            Op::Add => {
                let x = self.nat(&a[0])?;
                let y = self.nat(&a[1])?;
                Value::Nat(self.checked(x + y)?)
            }
            Op::Mul => {
                let x = self.nat(&a[0])?;
                let y = self.nat(&a[1])?;
                if !x.is_zero() && !y.is_zero() && x.bits() + y.bits() > self.budget.max_nat_bits + 1 {
                    return Err(self.exhausted(Resource::NatBits));
                }
                Value::Nat(self.checked(x * y)?)
            }
            Op::PrecNat => {
                let count = self.nat(&a[2])?;
                let mut acc = self.nat(&a[0])?;
                let mut i = BigUint::zero();
                while i < count {
                    let bindings = vec![(Var::Acc, Value::Nat(acc)), (Var::Idx, Value::Nat(i.clone()))];
                    acc = self.with_bindings(bindings, |ev| ev.nat(&a[1]))?;
                    i += BigUint::one();
                }
                Value::Nat(acc)
            }
            Op::Nil => Value::List(Vec::new()),
            Op::Cons => {
                let head = self.nat(&a[0])?;
                let mut tail = self.list(&a[1])?;
                tail.insert(0, head);
                Value::List(tail)
            }
            Op::First => Value::Nat(self.list(&a[0])?.into_iter().next().unwrap_or_default()),
            Op::Rest => {
                let mut l = self.list(&a[0])?;
                if !l.is_empty() {
                    l.remove(0);
                }
                Value::List(l)
            }
            Op::Append => {
                let mut x = self.list(&a[0])?;
                x.extend(self.list(&a[1])?);
                Value::List(x)
            }
            Op::Len => Value::Nat(BigUint::from(self.list(&a[0])?.len())),
            Op::Lt => {
                let x = self.nat(&a[0])?;
                let y = self.nat(&a[1])?;
                Value::Bool(x < y)
            }
            Op::If => {
                if self.boolean(&a[0])? {
                    self.eval(&a[1])?
                } else {
                    self.eval(&a[2])?
                }
            }
            Op::Filter => {
                let items = self.list(&a[0])?;
                let mut kept = Vec::new();
                for item in items {
                    let keep = self.with_bindings(vec![(Var::X, Value::Nat(item.clone()))], |ev| ev.boolean(&a[1]))?;
                    if keep {
                        kept.push(item);
                    }
                }
                Value::List(kept)
            }
            Op::PivotRec => {
                let items = self.list(&a[0])?;
                Value::List(self.pivot_rec(t, items)?)
            }
        })
    }

    fn partition(&mut self, pred: &Term, pivot: &BigUint, tail: &[BigUint]) -> Result<Vec<BigUint>, EvalError> {
        let mut out = Vec::new();
        for x in tail {
            let bindings = vec![(Var::X, Value::Nat(x.clone())), (Var::Pivot, Value::Nat(pivot.clone()))];
            if self.with_bindings(bindings, |ev| ev.boolean(pred))? {
                out.push(x.clone());
            }
        }
        Ok(out)
    }

    /// Partitions the tail around the head and recurses on both sides;
    /// each side is a sublist of the tail, so the recursion terminates.
    fn pivot_rec(&mut self, node: &Term, items: Vec<BigUint>) -> Result<Vec<BigUint>, EvalError> {
        let Some((pivot, tail)) = items.split_first() else {
            return Ok(Vec::new());
        };
        let a = node.args();
        let left = self.partition(&a[1], pivot, tail)?;
        let right = self.partition(&a[2], pivot, tail)?;
        self.tick()?;
        let sorted_left = self.pivot_rec(node, left)?;
        self.tick()?;
        let sorted_right = self.pivot_rec(node, right)?;
        let bindings = vec![
            (Var::L, Value::List(sorted_left)),
            (Var::Pivot, Value::Nat(pivot.clone())),
            (Var::R, Value::List(sorted_right)),
        ];
        self.with_bindings(bindings, |ev| ev.list(&a[3]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_well_formed, parse, Signature};

    fn nat_prog(text: &str) -> TypedProgram {
        check_well_formed(&parse(text).unwrap(), Sort::Nat, &Signature::input(Sort::Nat)).unwrap()
    }

    fn list_prog(text: &str) -> TypedProgram {
        check_well_formed(&parse(text).unwrap(), Sort::ListNat, &Signature::input(Sort::ListNat)).unwrap()
    }

    fn run(p: &TypedProgram, v: Value) -> Value {
        eval(p, &v, EvalBudget::default()).unwrap()
    }

    #[test]
    fn successor() {
        assert_eq!(run(&nat_prog("(succ n)"), Value::nat(4)), Value::nat(5));
    }

    #[test]
    fn precnat_unrolls() {
        // r0 = 0, then three steps of +2
        assert_eq!(
            run(&nat_prog("(precnat zero (succ (succ acc)) n)"), Value::nat(3)),
            Value::nat(6)
        );
        // idx runs 0..k-1: 0+1+2+3
        assert_eq!(
            run(&nat_prog("(precnat zero (add acc idx) n)"), Value::nat(4)),
            Value::nat(6)
        );
    }

    #[test]
    fn quicksort_core() {
        let qs = list_prog("(pivotrec n (lt x pivot) (lt pivot x) (append l (cons pivot r)))");
        assert_eq!(run(&qs, Value::list(&[3, 1, 2])), Value::list(&[1, 2, 3]));
        assert_eq!(run(&qs, Value::list(&[])), Value::list(&[]));
        // strict predicates drop repeats of the pivot
        assert_eq!(run(&qs, Value::list(&[2, 2, 1])), Value::list(&[1, 2]));
    }

    #[test]
    fn total_defaults() {
        assert_eq!(run(&nat_prog("(first nil)"), Value::nat(9)), Value::nat(0));
        assert_eq!(run(&list_prog("(rest nil)"), Value::list(&[1])), Value::list(&[]));
        assert_eq!(run(&list_prog("(rest n)"), Value::list(&[4, 5])), Value::list(&[5]));
        assert_eq!(
            run(&nat_prog("(len (cons n (cons n nil)))"), Value::nat(7)),
            Value::nat(2)
        );
    }

    #[test]
    fn filter_keeps_order() {
        let p = list_prog("(filter n (lt x (succ (succ zero))))");
        assert_eq!(run(&p, Value::list(&[3, 1, 0, 2, 1])), Value::list(&[1, 0, 1]));
    }

    #[test]
    fn if_is_lazy() {
        let p = nat_prog("(if (lt n (succ zero)) zero (precnat zero (succ acc) n))");
        assert_eq!(run(&p, Value::nat(0)), Value::nat(0));
        assert_eq!(run(&p, Value::nat(5)), Value::nat(5));
    }

    #[test]
    fn shadowing_uses_innermost_binder() {
        // inner filter rebinds x; the outer x is invisible inside it
        let sig = Signature::binders(&[Var::X]);
        let t = parse("(len (filter (cons zero (cons (succ zero) nil)) (lt zero x)))").unwrap();
        let p = check_well_formed(&t, Sort::Nat, &sig).unwrap();
        assert_eq!(
            eval_with(&p, &[Value::nat(100)], EvalBudget::default()).unwrap(),
            Value::nat(1)
        );
    }

    #[test]
    fn step_budget_is_enforced() {
        let p = nat_prog("(precnat zero (succ acc) n)");
        let err = eval(&p, &Value::nat(1_000_000), EvalBudget::new(1000)).unwrap_err();
        assert!(matches!(
            err,
            EvalError::ResourceExhausted {
                steps_used: 1000,
                resource: Resource::Steps
            }
        ));
        // exactly one step per evaluator call: root, target, base, then 2 per round
        let (res, steps) = eval_counted(&p, &Value::nat(3), EvalBudget::default());
        assert_eq!(res.unwrap(), Value::nat(3));
        assert_eq!(steps, 3 + 2 * 3);
        assert!(eval(&p, &Value::nat(3), EvalBudget::new(9)).is_ok());
        assert!(eval(&p, &Value::nat(3), EvalBudget::new(8)).is_err());
    }

    #[test]
    fn nat_size_cap() {
        let p = nat_prog("(precnat (succ (succ zero)) (mul acc acc) n)");
        assert_eq!(run(&p, Value::nat(3)), Value::nat(256));
        let err = eval(&p, &Value::nat(40), EvalBudget::default()).unwrap_err();
        assert!(matches!(
            err,
            EvalError::ResourceExhausted {
                resource: Resource::NatBits,
                ..
            }
        ));
    }

    #[test]
    fn input_mismatch() {
        let p = nat_prog("(succ n)");
        assert!(matches!(
            eval(&p, &Value::list(&[]), EvalBudget::default()),
            Err(EvalError::InputMismatch { .. })
        ));
    }

    #[test]
    fn big_naturals() {
        let p = nat_prog("(mul n n)");
        let big = Value::Nat(BigUint::from(u64::MAX));
        let expect = BigUint::from(u64::MAX) * BigUint::from(u64::MAX);
        assert_eq!(run(&p, big), Value::Nat(expect));
    }
}
