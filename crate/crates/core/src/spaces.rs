//! Analytical spaces: programs grouped by their behavior on a domain of
//! probe inputs.
//!
//! Each class keeps every program absorbed into it, so widening the domain
//! can split a class along the new probes. The representative of a class
//! is its cheapest member under (size, canonical order). Operations return
//! new spaces and leave their inputs untouched.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{
    check_well_formed, eval, parse, parse_value, EvalBudget, EvalError, Signature, Sort, Term, TypedProgram, Value,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a space needs at least one probe")]
    EmptyProbes,
    #[error("probe {0} is already in the domain")]
    DuplicateProbe(String),
    #[error("probe {probe} is not of sort {expected}")]
    ProbeSort { probe: String, expected: Sort },
    #[error("`{program}` does not read a single input of sort {expected}")]
    ProgramSignature { program: String, expected: Sort },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("bad snapshot: {0}")]
    Snapshot(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        probes: usize,
    },
    /// `new_class` is false when the program joined an existing class.
    Absorbed {
        program: String,
        new_class: bool,
    },
    Displaced {
        previous: String,
        program: String,
    },
    Unified {
        left_classes: usize,
        right_classes: usize,
        classes: usize,
    },
    Expanded {
        added: usize,
        classes_before: usize,
        classes_after: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Class {
    /// Distinct members, cheapest first; the first is the representative.
    members: Vec<TypedProgram>,
}

impl Class {
    pub fn representative(&self) -> &TypedProgram {
        &self.members[0]
    }

    pub fn members(&self) -> &[TypedProgram] {
        &self.members
    }

    /// Inserts in (size, canonical) position. Returns false if already present.
    fn insert(&mut self, p: TypedProgram) -> bool {
        match self.members.binary_search_by(|m| m.term().cmp(p.term())) {
            Ok(_) => false,
            Err(at) => {
                self.members.insert(at, p);
                true
            }
        }
    }
}

/// A class as (probe, output) pairs and member terms.
pub type ClassContent = (Vec<(Value, Value)>, Vec<Term>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyticalSpace {
    input_sort: Sort,
    probes: Vec<Value>,
    classes: BTreeMap<Vec<Value>, Class>,
    history: Vec<Event>,
    budget: EvalBudget,
}

fn check_probes(sort: Sort, existing: &[Value], new: &[Value]) -> Result<(), SpaceError> {
    for (i, p) in new.iter().enumerate() {
        if p.sort() != sort {
            return Err(SpaceError::ProbeSort {
                probe: p.to_string(),
                expected: sort,
            });
        }
        if existing.contains(p) || new[..i].contains(p) {
            return Err(SpaceError::DuplicateProbe(p.to_string()));
        }
    }
    Ok(())
}

impl AnalyticalSpace {
    pub fn new_space(probes: Vec<Value>) -> Result<AnalyticalSpace, SpaceError> {
        let sort = probes.first().ok_or(SpaceError::EmptyProbes)?.sort();
        check_probes(sort, &[], &probes)?;
        Ok(AnalyticalSpace {
            input_sort: sort,
            history: vec![Event::Created { probes: probes.len() }],
            probes,
            classes: BTreeMap::new(),
            budget: EvalBudget::default(),
        })
    }

    /// Evaluation budget for each program on each probe.
    pub fn with_budget(mut self, budget: EvalBudget) -> AnalyticalSpace {
        self.budget = budget;
        self
    }

    pub fn input_sort(&self) -> Sort {
        self.input_sort
    }

    pub fn probes(&self) -> &[Value] {
        &self.probes
    }

    pub fn classes(&self) -> &BTreeMap<Vec<Value>, Class> {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn history(&self) -> &[Event] {
        &self.history
    }

    /// Signature every absorbed program must have.
    pub fn signature(&self) -> Signature {
        Signature::input(self.input_sort)
    }

    pub fn fingerprint(&self, p: &TypedProgram) -> Result<Vec<Value>, SpaceError> {
        if p.signature() != &self.signature() {
            return Err(SpaceError::ProgramSignature {
                program: p.term().to_string(),
                expected: self.input_sort,
            });
        }
        Ok(self
            .probes
            .iter()
            .map(|v| eval(p, v, self.budget))
            .collect::<Result<_, _>>()?)
    }

    pub fn absorb(&self, p: TypedProgram) -> Result<AnalyticalSpace, SpaceError> {
        let mut out = self.clone();
        out.absorb_in_place(p, true)?;
        Ok(out)
    }

    fn absorb_in_place(&mut self, p: TypedProgram, log: bool) -> Result<(), SpaceError> {
        let fp = self.fingerprint(&p)?;
        let name = p.term().to_string();
        let event = match self.classes.get_mut(&fp) {
            None => {
                self.classes.insert(fp, Class { members: vec![p] });
                Event::Absorbed {
                    program: name,
                    new_class: true,
                }
            }
            Some(class) => {
                let previous = class.representative().term().to_string();
                class.insert(p);
                if class.representative().term().to_string() != previous {
                    Event::Displaced {
                        previous,
                        program: name,
                    }
                } else {
                    Event::Absorbed {
                        program: name,
                        new_class: false,
                    }
                }
            }
        };
        if log {
            self.history.push(event);
        }
        Ok(())
    }

    fn all_members(&self) -> impl Iterator<Item = &TypedProgram> {
        self.classes.values().flat_map(|c| c.members.iter())
    }

    /// A fresh space over `a`'s probes followed by `b`'s new ones, holding
    /// every member of both.
    pub fn unify(a: &AnalyticalSpace, b: &AnalyticalSpace) -> Result<AnalyticalSpace, SpaceError> {
        let mut probes = a.probes.clone();
        for p in &b.probes {
            if p.sort() != a.input_sort {
                return Err(SpaceError::ProbeSort {
                    probe: p.to_string(),
                    expected: a.input_sort,
                });
            }
            if !probes.contains(p) {
                probes.push(p.clone());
            }
        }
        let mut out = AnalyticalSpace::new_space(probes)?.with_budget(a.budget);
        for m in a.all_members().chain(b.all_members()) {
            out.absorb_in_place(m.clone(), false)?;
        }
        out.history.push(Event::Unified {
            left_classes: a.class_count(),
            right_classes: b.class_count(),
            classes: out.class_count(),
        });
        Ok(out)
    }

    /// Appends probes and splits every class whose members now disagree.
    pub fn expand_domain(&self, new_probes: Vec<Value>) -> Result<AnalyticalSpace, SpaceError> {
        check_probes(self.input_sort, &self.probes, &new_probes)?;
        let mut out = self.clone();
        out.probes.extend(new_probes.iter().cloned());
        out.classes.clear();
        for m in self.all_members() {
            out.absorb_in_place(m.clone(), false)?;
        }
        out.history.push(Event::Expanded {
            added: new_probes.len(),
            classes_before: self.class_count(),
            classes_after: out.class_count(),
        });
        Ok(out)
    }

    /// Classes as (probe, output) pairs sorted by probe, with member terms;
    /// equal for spaces holding the same behaviors whatever their probe order.
    pub fn content(&self) -> Vec<ClassContent> {
        let mut out: Vec<_> = self
            .classes
            .iter()
            .map(|(fp, c)| {
                let mut pairs: Vec<(Value, Value)> = self.probes.iter().cloned().zip(fp.iter().cloned()).collect();
                pairs.sort();
                (pairs, c.members.iter().map(|m| m.term().clone()).collect())
            })
            .collect();
        out.sort();
        out
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            input_sort: self.input_sort,
            probes: self.probes.iter().map(Value::to_string).collect(),
            classes: self
                .classes
                .iter()
                .map(|(fp, c)| ClassSnapshot {
                    fingerprint: fp.iter().map(Value::to_string).collect(),
                    representative: c.representative().term().to_string(),
                    member_count: c.members.len(),
                    members: c.members.iter().map(|m| m.term().to_string()).collect(),
                })
                .collect(),
            history_length: self.history.len(),
            history: self.history.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.snapshot()).expect("snapshots serialize")
    }

    /// Rebuilds a space, re-evaluating every member and checking that the
    /// recorded fingerprints and representatives still hold.
    pub fn from_snapshot(s: &Snapshot) -> Result<AnalyticalSpace, SpaceError> {
        let bad = |m: String| SpaceError::Snapshot(m);
        let probes = s
            .probes
            .iter()
            .map(|p| parse_value(p).map_err(|e| bad(format!("probe `{p}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let mut space = AnalyticalSpace::new_space(probes)?;
        if space.input_sort != s.input_sort {
            return Err(bad(format!("probes are not of sort {}", s.input_sort)));
        }
        let sig = space.signature();
        for c in &s.classes {
            if c.member_count != c.members.len() {
                return Err(bad(format!(
                    "class of `{}` lists a wrong member count",
                    c.representative
                )));
            }
            for m in &c.members {
                let term = parse(m).map_err(|e| bad(format!("member `{m}`: {e}")))?;
                let sort = crate::kernel::infer_sort(&term, &sig).map_err(|e| bad(format!("member `{m}`: {e}")))?;
                let p = check_well_formed(&term, sort, &sig).map_err(|e| bad(format!("member `{m}`: {e}")))?;
                let fp: Vec<String> = space.fingerprint(&p)?.iter().map(Value::to_string).collect();
                if fp != c.fingerprint {
                    return Err(bad(format!("member `{m}` does not match its class fingerprint")));
                }
                space.absorb_in_place(p, false)?;
            }
            let key: Vec<Value> = c
                .fingerprint
                .iter()
                .map(|v| parse_value(v).map_err(|e| bad(format!("fingerprint `{v}`: {e}"))))
                .collect::<Result<_, _>>()?;
            match space.classes.get(&key) {
                Some(k) if k.representative().term().to_string() == c.representative => {}
                _ => return Err(bad(format!("`{}` is not its class representative", c.representative))),
            }
        }
        if s.classes.len() != space.classes.len() {
            return Err(bad("two classes share a fingerprint".to_string()));
        }
        if s.history_length != s.history.len() {
            return Err(bad("history length disagrees with history".to_string()));
        }
        space.history = s.history.clone();
        Ok(space)
    }

    pub fn from_json(text: &str) -> Result<AnalyticalSpace, SpaceError> {
        let s: Snapshot = serde_json::from_str(text).map_err(|e| SpaceError::Snapshot(e.to_string()))?;
        AnalyticalSpace::from_snapshot(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSnapshot {
    pub fingerprint: Vec<String>,
    pub representative: String,
    pub member_count: usize,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub input_sort: Sort,
    pub probes: Vec<String>,
    pub classes: Vec<ClassSnapshot>,
    pub history_length: usize,
    pub history: Vec<Event>,
}
