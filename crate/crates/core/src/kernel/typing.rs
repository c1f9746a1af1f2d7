use std::fmt;

use thiserror::Error;

use super::term::{Op, Sort, Term, Var};

/// Position of a subterm: argument indices from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Path(pub Vec<usize>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for i in &self.0 {
            write!(f, "/{i}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("sort mismatch at {path}: expected {expected}, found {found}")]
    SortMismatch { path: Path, expected: Sort, found: Sort },
    #[error("unbound variable `{name}` at {path}")]
    UnboundVariable { name: &'static str, path: Path },
}

/// The free variables a term may mention, with their sorts. Later entries
/// shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Signature(Vec<(Var, Sort)>);

impl Signature {
    pub fn empty() -> Signature {
        Signature(Vec::new())
    }

    /// A single input variable `n` of the given sort.
    pub fn input(sort: Sort) -> Signature {
        Signature(vec![(Var::N, sort)])
    }

    /// Binder variables at their fixed sorts, e.g. `[X, Pivot]`.
    pub fn binders(vars: &[Var]) -> Signature {
        Signature(vars.iter().map(|&v| (v, v.bound_sort().unwrap_or(Sort::Nat))).collect())
    }

    pub fn new(entries: Vec<(Var, Sort)>) -> Signature {
        Signature(entries)
    }

    pub fn entries(&self) -> &[(Var, Sort)] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lookup(&self, v: Var) -> Option<Sort> {
        self.0.iter().rev().find(|(w, _)| *w == v).map(|(_, s)| *s)
    }

    pub fn extended(&self, vars: &[Var]) -> Signature {
        let mut out = self.clone();
        for &v in vars {
            out.0.push((v, v.bound_sort().unwrap_or(Sort::Nat)));
        }
        out
    }

    /// Sort of the input variable `n`, when present.
    pub fn input_sort(&self) -> Option<Sort> {
        self.lookup(Var::N)
    }
}

/// A term that has passed the sort checker under a signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedProgram {
    term: Term,
    signature: Signature,
    sort: Sort,
}

impl TypedProgram {
    pub fn term(&self) -> &Term {
        &self.term
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn sort(&self) -> Sort {
        self.sort
    }

    pub fn size(&self) -> usize {
        self.term.size()
    }

    pub fn into_term(self) -> Term {
        self.term
    }

    /// Skips the checker. Only for terms built by a generator that emits
    /// well-formed terms by construction.
    pub(crate) fn trusted(term: Term, signature: Signature, sort: Sort) -> TypedProgram {
        TypedProgram { term, signature, sort }
    }
}

impl fmt::Display for TypedProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.term, f)
    }
}

/// Accepts `t` iff it has sort `expected` with free variables drawn from
/// `free`.
pub fn check_well_formed(t: &Term, expected: Sort, free: &Signature) -> Result<TypedProgram, TypeError> {
    let mut path = Vec::new();
    let mut env = free.0.clone();
    check(t, expected, &mut env, &mut path)?;
    Ok(TypedProgram {
        term: t.clone(),
        signature: free.clone(),
        sort: expected,
    })
}

/// Infers the unique sort of `t` under `free`.
pub fn infer_sort(t: &Term, free: &Signature) -> Result<Sort, TypeError> {
    let mut path = Vec::new();
    let mut env = free.0.clone();
    infer(t, &mut env, &mut path)
}

fn lookup(env: &[(Var, Sort)], v: Var) -> Option<Sort> {
    env.iter().rev().find(|(w, _)| *w == v).map(|(_, s)| *s)
}

fn check(t: &Term, expected: Sort, env: &mut Vec<(Var, Sort)>, path: &mut Vec<usize>) -> Result<(), TypeError> {
    let found = infer(t, env, path)?;
    if found != expected {
        return Err(TypeError::SortMismatch {
            path: Path(path.clone()),
            expected,
            found,
        });
    }
    Ok(())
}

fn check_arg(
    t: &Term,
    i: usize,
    expected: Sort,
    env: &mut Vec<(Var, Sort)>,
    path: &mut Vec<usize>,
) -> Result<(), TypeError> {
    let binders = t.op().binders(i);
    for &v in binders {
        env.push((v, v.bound_sort().unwrap_or(Sort::Nat)));
    }
    path.push(i);
    let res = check(t.arg(i), expected, env, path);
    path.pop();
    env.truncate(env.len() - binders.len());
    res
}

fn infer(t: &Term, env: &mut Vec<(Var, Sort)>, path: &mut Vec<usize>) -> Result<Sort, TypeError> {
    match t.op() {
        Op::Var(v) => lookup(env, v).ok_or_else(|| TypeError::UnboundVariable {
            name: v.name(),
            path: Path(path.clone()),
        }),
        Op::If => {
            check_arg(t, 0, Sort::Bool, env, path)?;
            path.push(1);
            let branch = infer(t.arg(1), env, path);
            path.pop();
            let branch = branch?;
            check_arg(t, 2, branch, env, path)?;
            Ok(branch)
        }
        op => {
            let result = op.result_sort().expect("non-variable labels have a result sort");
            for (i, s) in op.arg_sorts(result).into_iter().enumerate() {
                check_arg(t, i, s, env, path)?;
            }
            Ok(result)
        }
    }
}
