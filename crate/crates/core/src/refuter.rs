//! Refuting would-be deciders of totality.
//!
//! A classifier picks out indices of the enumeration. Whatever it picks,
//! the accepted programs form a sub-enumeration `a_1, a_2, ...`, and the
//! diagonal over that sub-enumeration is a total function the classifier
//! never accepted.

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use thiserror::Error;

use crate::diagonal::{witness_rows, DiagError, Family, OracleFn, Witness};
use crate::enumeration::{enumerate_stream, EnumCursor, EnumError, Tier};
use crate::kernel::{check_well_formed, eval, EvalBudget, EvalError, Signature, Sort, Term, TypedProgram, Value};

pub const DEFAULT_HORIZON: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Policy {
    MaxSize(usize),
    All,
    None,
}

/// Decides which enumeration indices count as "total function
/// descriptions".
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classifier {
    Builtin(Policy),
    /// Accepts index `i` iff the decider maps `i` to a non-zero value.
    ProgramBacked(TypedProgram),
}

impl Classifier {
    /// A decider must itself be a `natfn` program.
    pub fn program(decider: &Term) -> Result<Classifier, EnumError> {
        Tier::NatFn.enumeration().index_of(decider)?;
        let p = check_well_formed(decider, Sort::Nat, &Signature::input(Sort::Nat))
            .map_err(|e| EnumError::NotInTier(e.to_string()))?;
        Ok(Classifier::ProgramBacked(p))
    }

    pub fn accepts(&self, index: u64, program: &TypedProgram, budget: EvalBudget) -> Result<bool, RefuteError> {
        match self {
            Classifier::Builtin(Policy::All) => Ok(true),
            Classifier::Builtin(Policy::None) => Ok(false),
            Classifier::Builtin(Policy::MaxSize(b)) => Ok(program.size() <= *b),
            Classifier::ProgramBacked(d) => match eval(d, &Value::nat(index), budget) {
                Ok(Value::Nat(v)) => Ok(v != 0u32.into()),
                Ok(other) => unreachable!("nat decider produced {other}"),
                Err(source) => Err(RefuteError::Decider { index, source }),
            },
        }
    }
}

impl fmt::Display for Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classifier::Builtin(Policy::MaxSize(b)) => write!(f, "maxsize:{b}"),
            Classifier::Builtin(Policy::All) => f.write_str("all"),
            Classifier::Builtin(Policy::None) => f.write_str("none"),
            Classifier::ProgramBacked(p) => write!(f, "program:{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefuteError {
    #[error(
        "classifier accepted only {accepted} of the {wanted} programs requested within the first {horizon} indices"
    )]
    EmptyClassifier {
        accepted: usize,
        wanted: usize,
        horizon: u64,
    },
    #[error("decider exhausted its budget on index {index}: {source}")]
    Decider { index: u64, source: EvalError },
    #[error(transparent)]
    Diag(#[from] DiagError),
}

/// The tier's stream filtered by a classifier, scanning at most `horizon`
/// indices.
pub struct AcceptedStream {
    classifier: Classifier,
    cursor: EnumCursor,
    horizon: u64,
    budget: EvalBudget,
}

impl AcceptedStream {
    /// Next index scanned would be past the horizon.
    pub fn exhausted(&self) -> bool {
        self.cursor.next_index() > self.horizon
    }
}

impl Iterator for AcceptedStream {
    type Item = Result<(u64, TypedProgram), RefuteError>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.exhausted() {
            let (i, p) = self.cursor.next()?;
            match self.classifier.accepts(i, &p, self.budget) {
                Ok(true) => return Some(Ok((i, p))),
                Ok(false) => {}
                Err(e) => return Some(Err(e)),
            }
        }
        None
    }
}

pub fn accepted_stream(c: &Classifier, tier: Tier, horizon: u64) -> AcceptedStream {
    AcceptedStream {
        classifier: c.clone(),
        cursor: enumerate_stream(tier),
        horizon,
        budget: EvalBudget::default(),
    }
}

/// The accepted sub-enumeration as a family of functions; grows its
/// prefix on demand.
struct AcceptedFamily {
    classifier: Classifier,
    tier: Tier,
    budget: EvalBudget,
    state: Mutex<(Vec<(u64, TypedProgram)>, AcceptedStream)>,
}

impl Family for AcceptedFamily {
    fn at(&self, index: u64) -> Result<OracleFn, DiagError> {
        let mut guard = self.state.lock().unwrap_or_else(|e| e.into_inner());
        let (prefix, stream) = &mut *guard;
        while (prefix.len() as u64) < index {
            match stream.next() {
                Some(Ok(item)) => prefix.push(item),
                Some(Err(e)) => {
                    return Err(DiagError::MissingIndex {
                        index,
                        reason: e.to_string(),
                    })
                }
                None => {
                    return Err(DiagError::MissingIndex {
                        index,
                        reason: format!("fewer than {index} accepted programs within the horizon"),
                    })
                }
            }
        }
        let (_, p) = &prefix[(index - 1) as usize];
        Ok(OracleFn::program(p.clone(), self.tier, self.budget))
    }

    fn describe(&self) -> String {
        format!("accepted({}, {})", self.classifier, self.tier)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RefuteOptions {
    pub horizon: u64,
    pub budget: EvalBudget,
}

impl Default for RefuteOptions {
    fn default() -> Self {
        RefuteOptions {
            horizon: DEFAULT_HORIZON,
            budget: EvalBudget::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RefutationReport {
    pub classifier: Classifier,
    pub tier: Tier,
    pub accepted_prefix: Vec<(u64, TypedProgram)>,
    pub witnesses: Vec<Witness>,
    pub diag: OracleFn,
}

impl RefutationReport {
    /// Header record followed by one record per witness.
    pub fn json_lines(&self) -> Vec<String> {
        #[derive(Serialize)]
        struct Header<'a> {
            classifier: String,
            tier: &'a str,
            #[serde(rename = "N")]
            n: usize,
        }
        let header = Header {
            classifier: self.classifier.to_string(),
            tier: self.tier.name(),
            n: self.witnesses.len(),
        };
        std::iter::once(serde_json::to_string(&header).expect("header serializes"))
            .chain(
                self.witnesses
                    .iter()
                    .map(|w| serde_json::to_string(w).expect("witness serializes")),
            )
            .collect()
    }
}

pub fn refute(c: &Classifier, tier: Tier, n: usize) -> Result<RefutationReport, RefuteError> {
    refute_with(c, tier, n, RefuteOptions::default())
}

pub fn refute_with(c: &Classifier, tier: Tier, n: usize, opts: RefuteOptions) -> Result<RefutationReport, RefuteError> {
    let mut stream = accepted_stream(c, tier, opts.horizon);
    stream.budget = opts.budget;
    let mut prefix = Vec::with_capacity(n);
    while prefix.len() < n {
        match stream.next() {
            Some(item) => prefix.push(item?),
            None => {
                return Err(RefuteError::EmptyClassifier {
                    accepted: prefix.len(),
                    wanted: n,
                    horizon: opts.horizon,
                })
            }
        }
    }
    let family = Arc::new(AcceptedFamily {
        classifier: c.clone(),
        tier,
        budget: opts.budget,
        state: Mutex::new((prefix.clone(), stream)),
    });
    let diag = OracleFn::diagonal_of(family.clone());
    let witnesses = witness_rows(family.as_ref(), &diag, n as u64)?;
    Ok(RefutationReport {
        classifier: c.clone(),
        tier,
        accepted_prefix: prefix,
        witnesses,
        diag,
    })
}
