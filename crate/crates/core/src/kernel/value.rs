use std::fmt;

use num_bigint::BigUint;

use super::term::Sort;

/// Runtime values. Naturals are arbitrary precision; lists are finite.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Nat(BigUint),
    Bool(bool),
    List(Vec<BigUint>),
}

impl Value {
    pub fn nat(n: u64) -> Value {
        Value::Nat(BigUint::from(n))
    }

    pub fn list(items: &[u64]) -> Value {
        Value::List(items.iter().map(|&i| BigUint::from(i)).collect())
    }

    pub fn sort(&self) -> Sort {
        match self {
            Value::Nat(_) => Sort::Nat,
            Value::Bool(_) => Sort::Bool,
            Value::List(_) => Sort::ListNat,
        }
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Value::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[BigUint]> {
        match self {
            Value::List(l) => Some(l),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::List(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}
