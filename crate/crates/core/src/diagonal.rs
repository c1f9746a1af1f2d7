//! Diagonal functions, machine extension and iteration.
//!
//! A [`Machine`] produces an indexed stream of total functions. For any
//! stream `f_1, f_2, ...` the diagonal `g(n) = f_n(n) + 1` differs from
//! every `f_n` at `n`. Prepending `g` to the stream gives a new machine,
//! whose own diagonal escapes again, and so on.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::enumeration::Tier;
use crate::kernel::{eval, EvalBudget, EvalError, Term, TypedProgram, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagError {
    #[error("evaluation at index {index} exhausted its budget: {source}")]
    ResourceExhausted { index: u64, source: EvalError },
    #[error("no function at index {index}: {reason}")]
    MissingIndex { index: u64, reason: String },
}

/// An indexed stream of total functions, counted from 1.
pub trait Family: Send + Sync {
    fn at(&self, index: u64) -> Result<OracleFn, DiagError>;
    fn describe(&self) -> String;
}

/// Where an [`OracleFn`] came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    ProgramBacked { program: Term, tier: Tier },
    DiagonalOf(String),
}

enum Kind {
    Program { program: TypedProgram, budget: EvalBudget },
    Diagonal(Arc<dyn Family>),
}

struct Inner {
    kind: Kind,
    provenance: Provenance,
    memo: Mutex<HashMap<u64, BigUint>>,
}

/// A total function on naturals, memoized. Cloning shares the memo.
#[derive(Clone)]
pub struct OracleFn(Arc<Inner>);

impl OracleFn {
    fn from_kind(kind: Kind, provenance: Provenance) -> OracleFn {
        OracleFn(Arc::new(Inner {
            kind,
            provenance,
            memo: Mutex::new(HashMap::new()),
        }))
    }

    /// Wraps a `nat -> nat` program.
    pub fn program(program: TypedProgram, tier: Tier, budget: EvalBudget) -> OracleFn {
        let provenance = Provenance::ProgramBacked {
            program: program.term().clone(),
            tier,
        };
        OracleFn::from_kind(Kind::Program { program, budget }, provenance)
    }

    /// The diagonal of an arbitrary family.
    pub fn diagonal_of(family: Arc<dyn Family>) -> OracleFn {
        let provenance = Provenance::DiagonalOf(family.describe());
        OracleFn::from_kind(Kind::Diagonal(family), provenance)
    }

    pub fn provenance(&self) -> &Provenance {
        &self.0.provenance
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        match &self.0.provenance {
            Provenance::ProgramBacked { program, .. } => program.to_string(),
            Provenance::DiagonalOf(desc) => format!("diag[{desc}]"),
        }
    }

    /// Whether two handles share the same function object.
    pub fn same(&self, other: &OracleFn) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn apply(&self, n: u64) -> Result<BigUint, DiagError> {
        if let Some(v) = self.memo().get(&n) {
            return Ok(v.clone());
        }
        let v = match &self.0.kind {
            Kind::Program { program, budget } => match eval(program, &Value::nat(n), *budget) {
                Ok(Value::Nat(v)) => v,
                Ok(other) => unreachable!("nat program produced {other}"),
                Err(source) => return Err(DiagError::ResourceExhausted { index: n, source }),
            },
            // indices start at 1; g(0) is pinned to g(1)
            Kind::Diagonal(_) if n == 0 => self.apply(1)?,
            Kind::Diagonal(family) => family.at(n)?.apply(n)? + 1u32,
        };
        self.memo().insert(n, v.clone());
        Ok(v)
    }

    fn memo(&self) -> std::sync::MutexGuard<'_, HashMap<u64, BigUint>> {
        self.0.memo.lock().unwrap_or_else(|e| e.into_inner())
    }
}

impl fmt::Debug for OracleFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OracleFn({})", self.label())
    }
}

/// A producer of the stream `f_1, f_2, ...`.
#[derive(Clone)]
pub enum Machine {
    Base {
        tier: Tier,
        budget: EvalBudget,
    },
    /// `prepended` comes first, in order, then the inner stream.
    Extend {
        inner: Arc<Machine>,
        prepended: Vec<OracleFn>,
    },
}

impl Machine {
    pub fn base(tier: Tier) -> Machine {
        Machine::Base {
            tier,
            budget: EvalBudget::default(),
        }
    }

    pub fn base_with_budget(tier: Tier, budget: EvalBudget) -> Machine {
        Machine::Base { tier, budget }
    }

    /// The machine that produces `f` and then everything `self` produces.
    /// Extending an extension keeps one flat prefix list, newest first.
    pub fn extend(&self, f: OracleFn) -> Machine {
        match self {
            Machine::Base { .. } => Machine::Extend {
                inner: Arc::new(self.clone()),
                prepended: vec![f],
            },
            Machine::Extend { inner, prepended } => {
                let mut fns = Vec::with_capacity(prepended.len() + 1);
                fns.push(f);
                fns.extend(prepended.iter().cloned());
                Machine::Extend {
                    inner: inner.clone(),
                    prepended: fns,
                }
            }
        }
    }

    /// Number of prepended functions.
    pub fn depth(&self) -> usize {
        match self {
            Machine::Base { .. } => 0,
            Machine::Extend { inner, prepended } => prepended.len() + inner.depth(),
        }
    }

    pub fn fn_at(&self, index: u64) -> Result<OracleFn, DiagError> {
        if index == 0 {
            return Err(DiagError::MissingIndex {
                index,
                reason: "indices start at 1".into(),
            });
        }
        match self {
            Machine::Base { tier, budget } => {
                let p = tier
                    .enumeration()
                    .program_at(index)
                    .map_err(|e| DiagError::MissingIndex {
                        index,
                        reason: e.to_string(),
                    })?;
                Ok(OracleFn::program(p, *tier, *budget))
            }
            Machine::Extend { inner, prepended } => {
                let k = prepended.len() as u64;
                if index <= k {
                    Ok(prepended[(index - 1) as usize].clone())
                } else {
                    inner.fn_at(index - k)
                }
            }
        }
    }

    /// The stream itself, starting at index 1.
    pub fn stream(&self) -> impl Iterator<Item = Result<OracleFn, DiagError>> + '_ {
        (1..).map(move |i| self.fn_at(i))
    }
}

impl Family for Machine {
    fn at(&self, index: u64) -> Result<OracleFn, DiagError> {
        self.fn_at(index)
    }

    fn describe(&self) -> String {
        match self {
            Machine::Base { tier, .. } => format!("base({tier})"),
            Machine::Extend { .. } => format!("base({})+{}", self.tier(), self.depth()),
        }
    }
}

impl Machine {
    pub fn tier(&self) -> Tier {
        match self {
            Machine::Base { tier, .. } => *tier,
            Machine::Extend { inner, .. } => inner.tier(),
        }
    }
}

impl fmt::Debug for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Machine::Base { tier, .. } => write!(f, "Base({tier})"),
            Machine::Extend { inner, prepended } => f
                .debug_struct("Extend")
                .field("inner", inner)
                .field("prepended", &prepended.iter().map(OracleFn::label).collect::<Vec<_>>())
                .finish(),
        }
    }
}

/// `g(n) = f_n(n) + 1` against `m`.
pub fn diagonal(m: &Machine) -> OracleFn {
    OracleFn::diagonal_of(Arc::new(m.clone()))
}

pub fn extend(m: &Machine, f: OracleFn) -> Machine {
    m.extend(f)
}

/// One row of a witness table: `f_n(n)` and the diagonal's value there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub index: u64,
    pub fn_at_index: BigUint,
    pub diag_at: BigUint,
}

impl Witness {
    pub fn holds(&self) -> bool {
        self.diag_at == &self.fn_at_index + 1u32 && self.diag_at != self.fn_at_index
    }
}

/// Serializes a natural as an exact JSON number.
pub(crate) fn json_nat(n: &BigUint) -> serde_json::Number {
    n.to_string().parse().expect("decimal digits form a JSON number")
}

impl Serialize for Witness {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Witness", 3)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("fn_at_n", &json_nat(&self.fn_at_index))?;
        st.serialize_field("g_at_n", &json_nat(&self.diag_at))?;
        st.end()
    }
}

/// Rows `1..=n` for a family and a function claimed to be its diagonal.
/// `f_k(k)` is evaluated independently of the diagonal's own cache.
pub fn witness_rows(family: &dyn Family, diag: &OracleFn, n: u64) -> Result<Vec<Witness>, DiagError> {
    (1..=n)
        .map(|k| {
            let fn_at_index = family.at(k)?.apply(k)?;
            let diag_at = diag.apply(k)?;
            Ok(Witness {
                index: k,
                fn_at_index,
                diag_at,
            })
        })
        .collect()
}

/// The first `n` rows certifying that `diagonal(m)` escapes `m`.
pub fn witness_table(m: &Machine, n: u64) -> Result<Vec<Witness>, DiagError> {
    witness_rows(m, &diagonal(m), n)
}

/// `k` rounds of "extend by the current diagonal".
pub fn iterate(m0: &Machine, k: usize) -> Result<(Machine, Vec<OracleFn>), DiagError> {
    let mut m = m0.clone();
    let mut gs = Vec::with_capacity(k);
    for _ in 0..k {
        let g = diagonal(&m);
        m = m.extend(g.clone());
        gs.push(g);
    }
    Ok((m, gs))
}
