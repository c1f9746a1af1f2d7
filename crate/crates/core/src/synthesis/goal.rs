use thiserror::Error;

use crate::kernel::{parse_value, ParseError, Sort, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoalError {
    #[error("line {line}: {source}")]
    Value { line: usize, source: ParseError },
    #[error("line {line}: expected `input -> output`")]
    Shape { line: usize },
    #[error("goal has no examples")]
    NoExamples,
    #[error("examples disagree on sorts: {0}")]
    MixedSorts(String),
    #[error("probe {0} does not have the input sort")]
    ProbeSort(String),
}

/// Input-output examples plus the probe inputs used to fingerprint
/// candidates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSpec {
    input_sort: Sort,
    output_sort: Sort,
    examples: Vec<(Value, Value)>,
    probes: Vec<Value>,
}

impl GoalSpec {
    /// Probes are extended with every example input that is missing.
    pub fn new(examples: Vec<(Value, Value)>, probes: Vec<Value>) -> Result<GoalSpec, GoalError> {
        let (first_in, first_out) = examples.first().ok_or(GoalError::NoExamples)?;
        let (input_sort, output_sort) = (first_in.sort(), first_out.sort());
        if let Some((i, o)) = examples
            .iter()
            .find(|(i, o)| i.sort() != input_sort || o.sort() != output_sort)
        {
            return Err(GoalError::MixedSorts(format!("{i} -> {o}")));
        }
        if let Some(p) = probes.iter().find(|p| p.sort() != input_sort) {
            return Err(GoalError::ProbeSort(p.to_string()));
        }
        let mut all = Vec::with_capacity(probes.len() + examples.len());
        for p in probes.into_iter().chain(examples.iter().map(|(i, _)| i.clone())) {
            if !all.contains(&p) {
                all.push(p);
            }
        }
        Ok(GoalSpec {
            input_sort,
            output_sort,
            examples,
            probes: all,
        })
    }

    /// Examples with the default probe set for their input sort.
    pub fn from_examples(examples: Vec<(Value, Value)>) -> Result<GoalSpec, GoalError> {
        let sort = examples.first().ok_or(GoalError::NoExamples)?.0.sort();
        GoalSpec::new(examples, default_probes(sort))
    }

    /// One `input -> output` pair per line; blank lines are skipped.
    pub fn parse(text: &str) -> Result<GoalSpec, GoalError> {
        let mut examples = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or(GoalError::Shape { line: line_no })?;
            let value = |s: &str| parse_value(s.trim()).map_err(|source| GoalError::Value { line: line_no, source });
            examples.push((value(lhs)?, value(rhs)?));
        }
        GoalSpec::from_examples(examples)
    }

    pub fn input_sort(&self) -> Sort {
        self.input_sort
    }

    pub fn output_sort(&self) -> Sort {
        self.output_sort
    }

    pub fn examples(&self) -> &[(Value, Value)] {
        &self.examples
    }

    pub fn probes(&self) -> &[Value] {
        &self.probes
    }
}

/// `0..=6` for naturals, both booleans, and every list of length at most
/// 3 over `{0, 1, 2}`.
pub fn default_probes(sort: Sort) -> Vec<Value> {
    match sort {
        Sort::Nat => (0..=6).map(Value::nat).collect(),
        Sort::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Sort::ListNat => lists_up_to(3, &[0, 1, 2]),
    }
}

/// All lists of length `0..=max_len` over `alphabet`, shortest first.
pub fn lists_up_to(max_len: usize, alphabet: &[u64]) -> Vec<Value> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|l| {
                alphabet.iter().map(move |&a| {
                    let mut next = l.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out.into_iter().map(|l| Value::list(&l)).collect()
}
