use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::expr::{int_rational, EnumType, EnumValue, Expr, Type, Value};

/// Finite value set of one variable, as a contiguous range of grid indices.
///
/// Index `k` denotes the integer `k` for `Int`, `lo + k * step` for `Real`,
/// the `k`-th literal for enumerations, `false`/`true` for `Bool`, and the
/// `k`-th candidate for `Char` and `String`. Index order is value order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domain {
    pub var: String,
    pub ty: Type,
    pub lo: i128,
    pub hi: i128,
    grid: Grid,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Grid {
    Int,
    Real { lo: BigRational, step: BigRational },
    Enum(Arc<EnumType>),
    Bool,
    Char(Arc<Vec<char>>),
    Str(Arc<Vec<String>>),
}

impl Domain {
    /// Number of values, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        (self.hi.wrapping_sub(self.lo) as u128).saturating_add(1)
    }

    pub fn value(&self, k: i128) -> Value {
        match &self.grid {
            Grid::Int => Value::Int(k),
            Grid::Real { lo, step } => Value::Real(lo + int_rational(k) * step),
            Grid::Enum(ty) => Value::Enum(EnumValue {
                ty: ty.clone(),
                ordinal: k as usize,
            }),
            Grid::Bool => Value::Bool(k == 1),
            Grid::Char(table) => Value::Char(table[k as usize]),
            Grid::Str(table) => Value::Str(table[k as usize].clone()),
        }
    }

    /// All values in ascending order.
    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        (self.lo..=self.hi).map(|k| self.value(k))
    }

    /// Position of index `k` on the ordered key line shared with constants.
    pub(crate) fn key(&self, k: i128) -> BigRational {
        match &self.grid {
            Grid::Real { lo, step } => lo + int_rational(k) * step,
            _ => int_rational(k),
        }
    }

    /// Smallest and largest index whose key lies in `[lo, hi]`, excluding
    /// the bound itself where `strict` says so. The result may be empty.
    pub(crate) fn index_bounds(
        &self,
        lo: &BigRational,
        hi: &BigRational,
        strict: (bool, bool),
    ) -> (BigInt, BigInt) {
        let (lo, hi) = match &self.grid {
            Grid::Real { lo: base, step } => ((lo - base) / step, (hi - base) / step),
            _ => (lo.clone(), hi.clone()),
        };
        let mut first = lo.ceil().to_integer();
        if strict.0 && lo.is_integer() {
            first += 1;
        }
        let mut last = hi.floor().to_integer();
        if strict.1 && hi.is_integer() {
            last -= 1;
        }
        (first, last)
    }
}

/// Candidate values for variables whose types are not finite ranges.
#[derive(Clone, Debug, Default)]
pub(crate) struct Tables {
    pub chars: Arc<Vec<char>>,
    pub strs: Arc<Vec<String>>,
}

impl Tables {
    /// Every character and string constant in `exprs`, plus one fresh value
    /// per variable of that kind so that any pattern of (in)equalities
    /// among variables and constants remains realisable.
    pub fn new<'a>(exprs: impl IntoIterator<Item = &'a Expr>, types: &[Type]) -> Self {
        let mut chars = BTreeSet::new();
        let mut strs = BTreeSet::new();
        for e in exprs {
            e.for_each_const(&mut |v| match v {
                Value::Char(c) => {
                    chars.insert(*c);
                }
                Value::Str(s) => {
                    strs.insert(s.clone());
                }
                _ => {}
            });
        }
        let char_vars = types.iter().filter(|t| matches!(t, Type::Char)).count();
        let str_vars = types.iter().filter(|t| matches!(t, Type::Str)).count();

        let fresh_chars = ('a'..='z')
            .chain('A'..='Z')
            .chain('0'..='9')
            .chain((0x100..).filter_map(char::from_u32));
        let fresh: Vec<char> = fresh_chars
            .filter(|c| !chars.contains(c))
            .take(char_vars)
            .collect();
        chars.extend(fresh);

        let fresh_strs = std::iter::once(String::new())
            .chain(('a'..='z').map(String::from))
            .chain((1..).map(|n| format!("s{n}")));
        let fresh: Vec<String> = fresh_strs
            .filter(|s| !strs.contains(s))
            .take(str_vars)
            .collect();
        strs.extend(fresh);

        Tables {
            chars: Arc::new(chars.into_iter().collect()),
            strs: Arc::new(strs.into_iter().collect()),
        }
    }

    /// Key of a constant on the line shared with variable indices.
    pub fn key(&self, value: &Value) -> Option<BigRational> {
        match value {
            Value::Bool(b) => Some(int_rational(*b as i128)),
            Value::Int(_) | Value::Real(_) => value.as_rational(),
            Value::Enum(e) => Some(int_rational(e.ordinal as i128)),
            Value::Char(c) => self
                .chars
                .binary_search(c)
                .ok()
                .map(|i| int_rational(i as i128)),
            Value::Str(s) => self
                .strs
                .binary_search(s)
                .ok()
                .map(|i| int_rational(i as i128)),
        }
    }

    pub fn domain(&self, var: &str, ty: &Type) -> Result<Domain, String> {
        let (lo, hi, grid) = match ty {
            Type::Int { lo, hi } => (*lo, *hi, Grid::Int),
            Type::Real { lo, hi, step } => {
                let n = ((hi - lo) / step).floor().to_integer();
                let n = n
                    .to_i128()
                    .ok_or_else(|| format!("real domain of `{var}` has too many grid points"))?;
                (
                    0,
                    n,
                    Grid::Real {
                        lo: lo.clone(),
                        step: step.clone(),
                    },
                )
            }
            Type::Enum(e) => (0, e.literals.len() as i128 - 1, Grid::Enum(e.clone())),
            Type::Bool => (0, 1, Grid::Bool),
            Type::Char => (
                0,
                self.chars.len() as i128 - 1,
                Grid::Char(self.chars.clone()),
            ),
            Type::Str => (0, self.strs.len() as i128 - 1, Grid::Str(self.strs.clone())),
        };
        if lo > hi {
            return Err(format!("domain of `{var}` is empty"));
        }
        Ok(Domain {
            var: var.to_string(),
            ty: ty.clone(),
            lo,
            hi,
            grid,
        })
    }
}
