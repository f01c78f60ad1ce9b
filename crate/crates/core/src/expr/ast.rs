use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;

use super::value::{format_decimal, Value};

/// Relational operators of `nbe ~ nbe` predicates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
    Ne,
}

impl RelOp {
    pub const ALL: [RelOp; 6] = [
        RelOp::Lt,
        RelOp::Le,
        RelOp::Eq,
        RelOp::Ge,
        RelOp::Gt,
        RelOp::Ne,
    ];

    /// `<`, `=` and `>` are the ordered operators.
    pub fn is_ordered(self) -> bool {
        matches!(self, RelOp::Lt | RelOp::Eq | RelOp::Gt)
    }

    /// Operators that need a total order on their operands.
    pub fn needs_order(self) -> bool {
        !matches!(self, RelOp::Eq | RelOp::Ne)
    }

    /// The operator of the logical complement: `!(a < b)` is `a >= b`.
    pub fn complement(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ge => RelOp::Lt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ne => RelOp::Eq,
        }
    }

    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            RelOp::Lt => ord == Less,
            RelOp::Le => ord != Greater,
            RelOp::Eq => ord == Equal,
            RelOp::Ge => ord != Less,
            RelOp::Gt => ord == Greater,
            RelOp::Ne => ord != Equal,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "==",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
            RelOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

/// A Boolean predicate `lhs op rhs` over non-Boolean operands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub lhs: Box<Expr>,
    pub op: RelOp,
    pub rhs: Box<Expr>,
}

impl Predicate {
    pub fn new(lhs: Expr, op: RelOp, rhs: Expr) -> Self {
        Predicate {
            lhs: Box::new(lhs),
            op,
            rhs: Box::new(rhs),
        }
    }

    pub fn is_ordered(&self) -> bool {
        self.op.is_ordered()
    }

    pub fn with_op(&self, op: RelOp) -> Predicate {
        Predicate {
            lhs: self.lhs.clone(),
            op,
            rhs: self.rhs.clone(),
        }
    }
}

/// Requirement expressions: Boolean and non-Boolean forms share one tree and
/// are told apart by type checking.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Const(Value),
    Var(String),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Pred(Predicate),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn int(i: i128) -> Expr {
        Expr::Const(Value::Int(i))
    }

    pub fn bool(b: bool) -> Expr {
        Expr::Const(Value::Bool(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Expr {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Expr {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn rel(lhs: Expr, op: RelOp, rhs: Expr) -> Expr {
        Expr::Pred(Predicate::new(lhs, op, rhs))
    }

    pub fn arith(op: ArithOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Arith(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn ite(g: Expr, a: Expr, b: Expr) -> Expr {
        Expr::Ite(Box::new(g), Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction of `parts`; `true` when empty.
    pub fn conjunction(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Expr::bool(true),
            Some(first) => iter.fold(first, Expr::and),
        }
    }

    /// Left-nested disjunction of `parts`; `false` when empty.
    pub fn disjunction(parts: impl IntoIterator<Item = Expr>) -> Expr {
        let mut iter = parts.into_iter();
        match iter.next() {
            None => Expr::bool(false),
            Some(first) => iter.fold(first, Expr::or),
        }
    }

    /// Names of all variables referenced by the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Arith(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Pred(p) => {
                p.lhs.collect_vars(out);
                p.rhs.collect_vars(out);
            }
            Expr::Ite(g, a, b) => {
                g.collect_vars(out);
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Visits every constant in the tree.
    pub fn for_each_const(&self, f: &mut impl FnMut(&Value)) {
        match self {
            Expr::Const(v) => f(v),
            Expr::Var(_) => {}
            Expr::Not(e) => e.for_each_const(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Arith(_, a, b) => {
                a.for_each_const(f);
                b.for_each_const(f);
            }
            Expr::Pred(p) => {
                p.lhs.for_each_const(f);
                p.rhs.for_each_const(f);
            }
            Expr::Ite(g, a, b) => {
                g.for_each_const(f);
                a.for_each_const(f);
                b.for_each_const(f);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Pred(_) => 3,
            Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => 4,
            Expr::Arith(ArithOp::Mul, ..) => 5,
            Expr::Not(_) => 6,
            Expr::Const(Value::Int(i)) if *i < 0 => 6,
            Expr::Const(Value::Real(r)) if r.is_negative() => 6,
            _ => 7,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_bare(f)?;
            f.write_str(")")
        } else {
            self.write_bare(f)
        }
    }

    fn write_bare(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write_const(v, f),
            Expr::Var(name) => f.write_str(name),
            Expr::Not(e) => {
                f.write_str("!")?;
                e.write_at(f, 6)
            }
            Expr::Or(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(" || ")?;
                b.write_at(f, 2)
            }
            Expr::And(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" && ")?;
                b.write_at(f, 3)
            }
            Expr::Pred(p) => {
                p.lhs.write_at(f, 4)?;
                write!(f, " {} ", p.op.symbol())?;
                p.rhs.write_at(f, 4)
            }
            Expr::Arith(op, a, b) => {
                let prec = self.precedence();
                a.write_at(f, prec)?;
                write!(f, " {} ", op.symbol())?;
                b.write_at(f, prec + 1)
            }
            Expr::Ite(g, a, b) => write!(f, "ITE({g}, {a}, {b})"),
        }
    }
}

fn write_const(v: &Value, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match v {
        Value::Real(r) => f.write_str(&format_decimal(r)),
        Value::Char(c) => write!(f, "'{}'", escape(&c.to_string(), '\'')),
        Value::Str(s) => write!(f, "\"{}\"", escape(s, '"')),
        other => write!(f, "{other}"),
    }
}

fn escape(s: &str, quote: char) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out
}

/// Renders in the concrete requirement syntax with minimal parentheses.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_bare(f)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Expr::Pred(self.clone()).fmt(f)
    }
}
