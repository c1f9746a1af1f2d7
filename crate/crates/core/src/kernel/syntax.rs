//! S-expression reader and printer for terms and values.
//!
//! Terms print as `(op arg ...)` with single spaces and atoms for nullary
//! labels. Values print as decimal naturals, `true`/`false`, and
//! parenthesised lists of naturals (`()` is the empty list).

use num_bigint::BigUint;
use thiserror::Error;

use super::term::{Op, Term};
use super::value::Value;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown constructor `{0}`")]
    UnknownConstructor(String),
    #[error("`{op}` expects {expected} argument(s), found {found}")]
    Arity { op: String, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn read_sexp(text: &str) -> Result<Sexp, ParseError> {
    let bytes = text.as_bytes();
    let mut pos = 0;
    let sexp = read_one(bytes, &mut pos)?;
    skip_ws(bytes, &mut pos);
    if pos != bytes.len() {
        return Err(syntax(pos, "trailing input"));
    }
    Ok(sexp)
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn read_one(bytes: &[u8], pos: &mut usize) -> Result<Sexp, ParseError> {
    skip_ws(bytes, pos);
    let start = *pos;
    match bytes.get(*pos) {
        None => Err(syntax(start, "unexpected end of input")),
        Some(b'(') => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                skip_ws(bytes, pos);
                match bytes.get(*pos) {
                    None => return Err(syntax(start, "unbalanced `(`")),
                    Some(b')') => {
                        *pos += 1;
                        return Ok(Sexp::List(items, start));
                    }
                    Some(_) => items.push(read_one(bytes, pos)?),
                }
            }
        }
        Some(b')') => Err(syntax(start, "unexpected `)`")),
        Some(_) => {
            while *pos < bytes.len() && (bytes[*pos].is_ascii_alphanumeric() || bytes[*pos] == b'_') {
                *pos += 1;
            }
            if *pos == start {
                return Err(syntax(
                    start,
                    format!("unexpected character `{}`", bytes[start] as char),
                ));
            }
            // The atom range is ASCII, so this slice is valid UTF-8.
            let atom = std::str::from_utf8(&bytes[start..*pos]).unwrap_or_default();
            Ok(Sexp::Atom(atom.to_string(), start))
        }
    }
}

fn lookup(name: &str) -> Result<Op, ParseError> {
    Op::from_name(name).ok_or_else(|| ParseError::UnknownConstructor(name.to_string()))
}

fn to_term(sexp: &Sexp) -> Result<Term, ParseError> {
    match sexp {
        Sexp::Atom(name, _) => {
            let op = lookup(name)?;
            if op.arity() != 0 {
                return Err(ParseError::Arity {
                    op: name.clone(),
                    expected: op.arity(),
                    found: 0,
                });
            }
            Ok(Term::new(op, vec![]))
        }
        Sexp::List(items, offset) => {
            let (head, rest) = items.split_first().ok_or_else(|| syntax(*offset, "empty form"))?;
            let name = match head {
                Sexp::Atom(name, _) => name,
                Sexp::List(_, o) => return Err(syntax(*o, "constructor position holds a list")),
            };
            let op = lookup(name)?;
            if op.arity() == 0 || op.arity() != rest.len() {
                return Err(ParseError::Arity {
                    op: name.clone(),
                    expected: op.arity(),
                    found: rest.len(),
                });
            }
            let args = rest.iter().map(to_term).collect::<Result<Vec<_>, _>>()?;
            Ok(Term::new(op, args))
        }
    }
}

/// Parses program text into a term.
pub fn parse(text: &str) -> Result<Term, ParseError> {
    to_term(&read_sexp(text)?)
}

/// Canonical single-spaced rendering; `parse(&pretty(t)) == Ok(t)`.
pub fn pretty(t: &Term) -> String {
    t.to_string()
}

fn to_nat(sexp: &Sexp) -> Result<BigUint, ParseError> {
    match sexp {
        Sexp::Atom(a, offset) => a
            .parse::<BigUint>()
            .map_err(|_| syntax(*offset, format!("`{a}` is not a natural number"))),
        Sexp::List(_, offset) => Err(syntax(*offset, "nested lists are not values")),
    }
}

/// Parses a value: `7`, `true`, `false`, `(3 1 2)` or `()`.
pub fn parse_value(text: &str) -> Result<Value, ParseError> {
    match read_sexp(text)? {
        Sexp::Atom(a, _) if a == "true" => Ok(Value::Bool(true)),
        Sexp::Atom(a, _) if a == "false" => Ok(Value::Bool(false)),
        atom @ Sexp::Atom(..) => Ok(Value::Nat(to_nat(&atom)?)),
        Sexp::List(items, _) => Ok(Value::List(items.iter().map(to_nat).collect::<Result<_, _>>()?)),
    }
}
