use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;

use super::value::{format_decimal, int_rational, Value};

/// An enumeration type. Two enumerations are the same type when their
/// names and literal lists agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EnumType {
    pub name: Option<String>,
    pub literals: Vec<String>,
}

impl EnumType {
    pub fn ordinal(&self, literal: &str) -> Option<usize> {
        self.literals.iter().position(|l| l == literal)
    }
}

/// Declared type of a parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    Int {
        lo: i128,
        hi: i128,
    },
    Real {
        lo: BigRational,
        hi: BigRational,
        step: BigRational,
    },
    Enum(Arc<EnumType>),
    Char,
    Str,
}

/// The kind of an expression: a type with range information erased.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Bool,
    Int,
    Real,
    Enum(Arc<EnumType>),
    Char,
    Str,
}

impl Kind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, Kind::Int | Kind::Real)
    }

    /// Kinds that carry a total order usable by `<` and `>`.
    pub fn is_ordered(&self) -> bool {
        matches!(self, Kind::Int | Kind::Real | Kind::Enum(_))
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Bool => f.write_str("bool"),
            Kind::Int => f.write_str("int"),
            Kind::Real => f.write_str("real"),
            Kind::Enum(e) => match &e.name {
                Some(name) => write!(f, "enum {name}"),
                None => write!(f, "enum {{{}}}", e.literals.join(", ")),
            },
            Kind::Char => f.write_str("char"),
            Kind::Str => f.write_str("string"),
        }
    }
}

impl Type {
    pub fn kind(&self) -> Kind {
        match self {
            Type::Bool => Kind::Bool,
            Type::Int { .. } => Kind::Int,
            Type::Real { .. } => Kind::Real,
            Type::Enum(e) => Kind::Enum(e.clone()),
            Type::Char => Kind::Char,
            Type::Str => Kind::Str,
        }
    }

    /// Checks the declaration-level invariants of the type.
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Type::Int { lo, hi } if lo > hi => Err(format!("empty range {lo} .. {hi}")),
            Type::Real { lo, hi, step } => {
                if lo > hi {
                    Err(format!(
                        "empty range {} .. {}",
                        format_decimal(lo),
                        format_decimal(hi)
                    ))
                } else if !step.is_positive() {
                    Err(format!(
                        "step must be positive, got {}",
                        format_decimal(step)
                    ))
                } else {
                    Ok(())
                }
            }
            Type::Enum(e) => {
                if e.literals.is_empty() {
                    return Err("enumeration has no literals".into());
                }
                for (i, lit) in e.literals.iter().enumerate() {
                    if e.literals[..i].contains(lit) {
                        return Err(format!("duplicate enumeration literal `{lit}`"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Whether `value` is a member of this type's value set.
    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Type::Bool, Value::Bool(_)) => true,
            (Type::Int { lo, hi }, Value::Int(v)) => lo <= v && v <= hi,
            (Type::Real { lo, hi, step }, v @ (Value::Real(_) | Value::Int(_))) => {
                let r = v.as_rational().expect("numeric");
                if &r < lo || &r > hi {
                    return false;
                }
                ((r - lo) / step).is_integer()
            }
            (Type::Enum(t), Value::Enum(e)) => **t == *e.ty && e.ordinal < t.literals.len(),
            (Type::Char, Value::Char(_)) => true,
            (Type::Str, Value::Str(_)) => true,
            _ => false,
        }
    }

    /// The `k`-th grid point of a numeric type, counting from `lo`.
    pub fn grid_value(&self, k: &BigRational) -> Option<BigRational> {
        match self {
            Type::Int { lo, .. } => Some(int_rational(*lo) + k),
            Type::Real { lo, step, .. } => Some(lo + k * step),
            _ => None,
        }
    }

    /// Grid step of numeric types: 1 for integers, `step` for reals.
    pub fn step(&self) -> Option<BigRational> {
        match self {
            Type::Int { .. } => Some(int_rational(1)),
            Type::Real { step, .. } => Some(step.clone()),
            _ => None,
        }
    }
}
