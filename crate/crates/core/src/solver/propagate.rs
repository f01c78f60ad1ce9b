//! Interval propagation over the key line of every variable.
//!
//! Numeric sub-expressions are over-approximated by closed rational
//! intervals; requiring a Boolean expression to take a truth value narrows
//! the index ranges of the variables it mentions. Narrowing only removes
//! assignments that cannot satisfy the requirement.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use super::domain::{Domain, Tables};
use crate::expr::{ArithOp, Expr, RelOp};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Iv {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Iv {
    fn point(v: BigRational) -> Self {
        Iv {
            lo: v.clone(),
            hi: v,
        }
    }

    fn hull(&self, other: &Iv) -> Iv {
        Iv {
            lo: (&self.lo).min(&other.lo).clone(),
            hi: (&self.hi).max(&other.hi).clone(),
        }
    }

    fn meet(&self, other: &Iv) -> Option<Iv> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        (lo <= hi).then_some(Iv { lo, hi })
    }

    fn add(&self, o: &Iv) -> Iv {
        Iv {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    fn sub(&self, o: &Iv) -> Iv {
        Iv {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    fn mul(&self, o: &Iv) -> Iv {
        Self::span([
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ])
    }

    /// Quotient, for divisors that exclude zero.
    fn div(&self, o: &Iv) -> Iv {
        Self::span([
            &self.lo / &o.lo,
            &self.lo / &o.hi,
            &self.hi / &o.lo,
            &self.hi / &o.hi,
        ])
    }

    fn span(v: [BigRational; 4]) -> Iv {
        let lo = v.iter().min().unwrap().clone();
        let hi = v.iter().max().unwrap().clone();
        Iv { lo, hi }
    }

    fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }
}

/// Some requirement cannot hold on the current ranges.
#[derive(Debug)]
pub(crate) struct Conflict;

type Narrowed = Result<(), Conflict>;

/// Current index range of every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Store {
    pub ranges: Vec<(i128, i128)>,
}

pub(crate) struct Propagator<'m> {
    pub domains: &'m [Domain],
    pub index: &'m HashMap<String, usize>,
    pub tables: &'m Tables,
}

impl Propagator<'_> {
    fn var(&self, name: &str) -> usize {
        self.index[name]
    }

    fn const_key(&self, v: &crate::expr::Value) -> BigRational {
        self.tables
            .key(v)
            .expect("candidate tables hold every constant")
    }

    /// Interval enclosing every value of a non-Boolean expression.
    pub fn fwd(&self, e: &Expr, s: &Store) -> Iv {
        match e {
            Expr::Const(v) => Iv::point(self.const_key(v)),
            Expr::Var(name) => {
                let i = self.var(name);
                let (a, b) = s.ranges[i];
                let d = &self.domains[i];
                Iv {
                    lo: d.key(a),
                    hi: d.key(b),
                }
            }
            Expr::Arith(op, a, b) => {
                let (a, b) = (self.fwd(a, s), self.fwd(b, s));
                match op {
                    ArithOp::Add => a.add(&b),
                    ArithOp::Sub => a.sub(&b),
                    ArithOp::Mul => a.mul(&b),
                }
            }
            Expr::Ite(g, a, b) => match self.truth(g, s) {
                Some(true) => self.fwd(a, s),
                Some(false) => self.fwd(b, s),
                None => self.fwd(a, s).hull(&self.fwd(b, s)),
            },
            // Boolean operands do not occur in well-typed relations.
            _ => Iv {
                lo: BigRational::zero(),
                hi: BigRational::from_integer(1.into()),
            },
        }
    }

    /// Truth value of a Boolean expression if the ranges already decide it.
    pub fn truth(&self, e: &Expr, s: &Store) -> Option<bool> {
        match e {
            Expr::Const(v) => v.as_bool(),
            Expr::Var(name) => {
                let (a, b) = s.ranges[self.var(name)];
                (a == b).then_some(a == 1)
            }
            Expr::Not(a) => self.truth(a, s).map(|t| !t),
            Expr::And(a, b) => match (self.truth(a, s), self.truth(b, s)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Expr::Or(a, b) => match (self.truth(a, s), self.truth(b, s)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
            Expr::Pred(p) => {
                let (l, r) = (self.fwd(&p.lhs, s), self.fwd(&p.rhs, s));
                let possible = [
                    (l.lo < r.hi, std::cmp::Ordering::Less),
                    (l.lo <= r.hi && r.lo <= l.hi, std::cmp::Ordering::Equal),
                    (l.hi > r.lo, std::cmp::Ordering::Greater),
                ];
                let mut holds = possible
                    .iter()
                    .filter(|(p, _)| *p)
                    .map(|(_, o)| p.op.holds(*o));
                let first = holds.next()?;
                holds.all(|h| h == first).then_some(first)
            }
            Expr::Ite(g, a, b) => match self.truth(g, s) {
                Some(true) => self.truth(a, s),
                Some(false) => self.truth(b, s),
                None => match (self.truth(a, s), self.truth(b, s)) {
                    (Some(x), Some(y)) if x == y => Some(x),
                    _ => None,
                },
            },
            Expr::Arith(..) => None,
        }
    }

    /// Narrows `s` so that `e` can still evaluate to `want`.
    pub fn enforce(&self, e: &Expr, want: bool, s: &mut Store) -> Narrowed {
        match e {
            Expr::Const(v) => match v.as_bool() {
                Some(b) if b != want => Err(Conflict),
                _ => Ok(()),
            },
            Expr::Var(name) => {
                let i = self.var(name);
                let k = want as i128;
                let (a, b) = s.ranges[i];
                if a <= k && k <= b {
                    s.ranges[i] = (k, k);
                    Ok(())
                } else {
                    Err(Conflict)
                }
            }
            Expr::Not(a) => self.enforce(a, !want, s),
            Expr::And(a, b) | Expr::Or(a, b) => {
                // Both sides must take the value that decides the connective.
                let decisive = matches!(e, Expr::Or(..));
                if want != decisive {
                    self.enforce(a, want, s)?;
                    self.enforce(b, want, s)
                } else if self.truth(a, s) == Some(!want) {
                    self.enforce(b, want, s)
                } else if self.truth(b, s) == Some(!want) {
                    self.enforce(a, want, s)
                } else {
                    Ok(())
                }
            }
            Expr::Pred(p) => {
                let op = if want { p.op } else { p.op.complement() };
                self.relate(&p.lhs, op, &p.rhs, s)
            }
            Expr::Ite(g, a, b) => match self.truth(g, s) {
                Some(true) => self.enforce(a, want, s),
                Some(false) => self.enforce(b, want, s),
                None => {
                    if self.truth(a, s) == Some(!want) {
                        self.enforce(g, false, s)?;
                        self.enforce(b, want, s)
                    } else if self.truth(b, s) == Some(!want) {
                        self.enforce(g, true, s)?;
                        self.enforce(a, want, s)
                    } else {
                        Ok(())
                    }
                }
            },
            Expr::Arith(..) => Ok(()),
        }
    }

    fn relate(&self, lhs: &Expr, op: RelOp, rhs: &Expr, s: &mut Store) -> Narrowed {
        let (l, r) = (self.fwd(lhs, s), self.fwd(rhs, s));
        match op {
            RelOp::Lt | RelOp::Le => {
                let strict = op == RelOp::Lt;
                self.narrow(
                    lhs,
                    &Iv {
                        lo: l.lo.clone(),
                        hi: r.hi.clone(),
                    },
                    (false, strict),
                    s,
                )?;
                self.narrow(rhs, &Iv { lo: l.lo, hi: r.hi }, (strict, false), s)
            }
            RelOp::Gt | RelOp::Ge => {
                let strict = op == RelOp::Gt;
                self.narrow(
                    lhs,
                    &Iv {
                        lo: r.lo.clone(),
                        hi: l.hi.clone(),
                    },
                    (strict, false),
                    s,
                )?;
                self.narrow(rhs, &Iv { lo: r.lo, hi: l.hi }, (false, strict), s)
            }
            RelOp::Eq => {
                let both = l.meet(&r).ok_or(Conflict)?;
                self.narrow(lhs, &both, (false, false), s)?;
                self.narrow(rhs, &both, (false, false), s)
            }
            RelOp::Ne => {
                if l.lo == l.hi && r.lo == r.hi && l.lo == r.lo {
                    return Err(Conflict);
                }
                if r.lo == r.hi {
                    self.exclude(lhs, &r.lo, s)?;
                }
                if l.lo == l.hi {
                    self.exclude(rhs, &l.lo, s)?;
                }
                Ok(())
            }
        }
    }

    /// Removes `point` from a variable's range when it sits at an end.
    fn exclude(&self, e: &Expr, point: &BigRational, s: &mut Store) -> Narrowed {
        if let Expr::Var(name) = e {
            let i = self.var(name);
            let d = &self.domains[i];
            let (mut a, mut b) = s.ranges[i];
            if &d.key(a) == point {
                a += 1;
            }
            if a <= b && &d.key(b) == point {
                b -= 1;
            }
            if a > b {
                return Err(Conflict);
            }
            s.ranges[i] = (a, b);
        }
        Ok(())
    }

    /// Narrows `s` so that `e` can still take a value in `target`; `strict`
    /// excludes the lower and upper bound respectively.
    fn narrow(&self, e: &Expr, target: &Iv, strict: (bool, bool), s: &mut Store) -> Narrowed {
        let current = self.fwd(e, s);
        let t = current.meet(target).ok_or(Conflict)?;
        let open_lo = strict.0 && t.lo == target.lo;
        let open_hi = strict.1 && t.hi == target.hi;
        if t.lo == t.hi && (open_lo || open_hi) {
            return Err(Conflict);
        }
        match e {
            Expr::Var(name) => {
                let i = self.var(name);
                let (first, last) = self.domains[i].index_bounds(&t.lo, &t.hi, (open_lo, open_hi));
                let (a, b) = s.ranges[i];
                let a = BigInt::from(a).max(first);
                let b = BigInt::from(b).min(last);
                if a > b {
                    return Err(Conflict);
                }
                // Both lie within the previous range, hence within i128.
                s.ranges[i] = (a.to_i128().unwrap(), b.to_i128().unwrap());
                Ok(())
            }
            Expr::Arith(op, a, b) => {
                let ib = self.fwd(b, s);
                match op {
                    ArithOp::Add => {
                        self.narrow(a, &t.sub(&ib), (false, false), s)?;
                        let ia = self.fwd(a, s);
                        self.narrow(b, &t.sub(&ia), (false, false), s)
                    }
                    ArithOp::Sub => {
                        self.narrow(a, &t.add(&ib), (false, false), s)?;
                        let ia = self.fwd(a, s);
                        self.narrow(b, &ia.sub(&t), (false, false), s)
                    }
                    ArithOp::Mul => {
                        if !ib.contains_zero() {
                            self.narrow(a, &t.div(&ib), (false, false), s)?;
                        }
                        let ia = self.fwd(a, s);
                        if !ia.contains_zero() {
                            self.narrow(b, &t.div(&ia), (false, false), s)?;
                        }
                        Ok(())
                    }
                }
            }
            Expr::Ite(g, a, b) => {
                let open = (open_lo, open_hi);
                match self.truth(g, s) {
                    Some(true) => self.narrow(a, &t, open, s),
                    Some(false) => self.narrow(b, &t, open, s),
                    None => {
                        if self.fwd(a, s).meet(&t).is_none() {
                            self.enforce(g, false, s)?;
                            self.narrow(b, &t, open, s)
                        } else if self.fwd(b, s).meet(&t).is_none() {
                            self.enforce(g, true, s)?;
                            self.narrow(a, &t, open, s)
                        } else {
                            Ok(())
                        }
                    }
                }
            }
            _ => Ok(()),
        }
    }
}
