use std::collections::BTreeMap;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{Direction, FunctionSpec, Param, Requirement, SourceLocation, SpecError};
use crate::expr::{
    parse_decimal, typecheck, ArithOp, EnumType, EnumValue, Expr, Kind, RelOp, Scope, Type, Value,
};

const RESERVED: [&str; 3] = ["true", "false", "ITE"];

/// Parses a requirement document. `file` names the document in recorded
/// source locations. Either every function parses and validates, or an
/// error is returned.
pub fn parse(text: &str, file: &str) -> Result<Vec<FunctionSpec>, SpecError> {
    let mut p = Parser {
        toks: tokenize(text, file)?,
        pos: 0,
        file,
        depth: 0,
    };
    let mut specs: Vec<FunctionSpec> = Vec::new();
    p.skip_newlines();
    while p.peek_raw().tok != Tok::Eof {
        let start = p.loc();
        let spec = p.function()?;
        if specs.iter().any(|s| s.name == spec.name) {
            return Err(SpecError::Invalid {
                loc: start,
                message: format!("function `{}` is declared twice", spec.name),
            });
        }
        specs.push(spec);
        p.skip_newlines();
    }
    Ok(specs)
}

/// Parses a single expression without resolving names or type checking.
pub fn parse_expression(text: &str) -> Result<Expr, SpecError> {
    let mut p = Parser {
        toks: tokenize(text, "<expr>")?,
        pos: 0,
        file: "<expr>",
        depth: 0,
    };
    p.skip_newlines();
    let e = p.expr()?;
    p.skip_newlines();
    match &p.peek_raw().tok {
        Tok::Eof => Ok(e),
        other => Err(p.syntax(format!("unexpected {} after expression", other.describe()))),
    }
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    file: &'a str,
    /// Open parentheses; line breaks are insignificant while this is non-zero.
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek_raw(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek(&mut self) -> &Tok {
        if self.depth > 0 {
            while self.toks[self.pos].tok == Tok::Newline {
                self.pos += 1;
            }
        }
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Token {
        self.peek();
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn loc(&self) -> SourceLocation {
        let t = self.peek_raw();
        SourceLocation::new(self.file, t.line, t.col)
    }

    fn syntax(&self, message: String) -> SpecError {
        SpecError::Syntax {
            loc: self.loc(),
            message,
        }
    }

    fn expect(&mut self, want: Tok) -> Result<Token, SpecError> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            let found = self.peek().describe();
            Err(self.syntax(format!("expected {}, found {found}", want.describe())))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), SpecError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            other => {
                let found = other.describe();
                Err(self.syntax(format!("expected `{kw}`, found {found}")))
            }
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, SourceLocation), SpecError> {
        let loc = self.loc();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, loc))
            }
            other => Err(self.syntax(format!("expected {what}, found {}", other.describe()))),
        }
    }

    fn skip_newlines(&mut self) {
        while self.peek_raw().tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn end_of_line(&mut self) -> Result<(), SpecError> {
        match self.peek_raw().tok {
            Tok::Newline => {
                self.pos += 1;
                Ok(())
            }
            Tok::Eof => Ok(()),
            ref other => {
                let found = other.describe();
                Err(self.syntax(format!("expected end of line, found {found}")))
            }
        }
    }

    fn at_line_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek_raw().tok, Tok::Ident(s) if s == kw)
    }

    fn function(&mut self) -> Result<FunctionSpec, SpecError> {
        self.expect_keyword("function")?;
        let (name, _) = self.ident("function name")?;
        self.end_of_line()?;

        let mut params: Vec<Param> = Vec::new();
        let mut pre = Vec::new();
        let mut post = Vec::new();
        let mut pending: Option<(SourceLocation, SourceLocation)> = None;

        loop {
            self.skip_newlines();
            if self.peek_raw().tok == Tok::Eof || self.at_line_keyword("function") {
                break;
            }
            let line_loc = self.loc();
            match self.peek_raw().tok.clone() {
                Tok::Directive(raw) => {
                    self.pos += 1;
                    if pending.is_some() {
                        return Err(SpecError::Syntax {
                            loc: line_loc,
                            message: "consecutive `@` directives".into(),
                        });
                    }
                    let target = parse_location(&raw).ok_or_else(|| SpecError::Syntax {
                        loc: line_loc.clone(),
                        message: format!("malformed location `{raw}`, expected file:line:column"),
                    })?;
                    pending = Some((target, line_loc));
                    self.end_of_line()?;
                }
                Tok::Ident(kw) if kw == "pre" || kw == "post" => {
                    self.pos += 1;
                    self.expect(Tok::Colon)?;
                    let natural = self.loc();
                    let expr = self.expr()?;
                    self.end_of_line()?;
                    let loc = pending.take().map(|(l, _)| l).unwrap_or(natural);
                    let req = Requirement { expr, loc };
                    if kw == "pre" {
                        pre.push(req);
                    } else {
                        post.push(req);
                    }
                }
                Tok::Ident(kw) => {
                    let direction = match kw.as_str() {
                        "in" => Direction::In,
                        "out" => Direction::Out,
                        "global_in" => Direction::GlobalIn,
                        "global_out" => Direction::GlobalOut,
                        other => {
                            return Err(SpecError::Syntax {
                                loc: line_loc,
                                message: format!(
                                    "expected a parameter, `pre:` or `post:`, found `{other}`"
                                ),
                            })
                        }
                    };
                    self.pos += 1;
                    let (pname, natural) = self.ident("parameter name")?;
                    self.expect(Tok::Colon)?;
                    let ty = self.type_decl()?;
                    self.end_of_line()?;
                    let loc = pending.take().map(|(l, _)| l).unwrap_or(natural.clone());
                    if RESERVED.contains(&pname.as_str()) {
                        return Err(SpecError::Invalid {
                            loc: natural,
                            message: format!("`{pname}` is reserved"),
                        });
                    }
                    if params.iter().any(|p| p.name == pname) {
                        return Err(SpecError::Invalid {
                            loc: natural,
                            message: format!("parameter `{pname}` is declared twice"),
                        });
                    }
                    params.push(Param {
                        name: pname,
                        direction,
                        ty,
                        loc,
                    });
                }
                other => {
                    return Err(SpecError::Syntax {
                        loc: line_loc,
                        message: format!("unexpected {}", other.describe()),
                    })
                }
            }
        }
        if let Some((_, at)) = pending {
            return Err(SpecError::Syntax {
                loc: at,
                message: "`@` directive is not followed by a declaration".into(),
            });
        }

        let mut spec = FunctionSpec {
            name,
            params,
            pre: Vec::new(),
            post: Vec::new(),
        };
        check_literal_clashes(&spec)?;
        let literals = enum_literals(&spec);
        for (is_pre, reqs) in [(true, pre), (false, post)] {
            for req in reqs {
                let expr = resolve(req.expr, &spec, &literals, &req.loc)?;
                check_requirement(&expr, &spec, is_pre, &req.loc)?;
                let req = Requirement { expr, loc: req.loc };
                if is_pre {
                    spec.pre.push(req);
                } else {
                    spec.post.push(req);
                }
            }
        }
        Ok(spec)
    }

    fn type_decl(&mut self) -> Result<Type, SpecError> {
        let loc = self.loc();
        let (kw, _) = self.ident("a type")?;
        let ty = match kw.as_str() {
            "bool" => Type::Bool,
            "char" => Type::Char,
            "string" => Type::Str,
            "int" => {
                self.expect_keyword("range")?;
                let lo = self.signed_int()?;
                self.expect(Tok::DotDot)?;
                let hi = self.signed_int()?;
                Type::Int { lo, hi }
            }
            "real" => {
                self.expect_keyword("range")?;
                let lo = self.signed_decimal()?;
                self.expect(Tok::DotDot)?;
                let hi = self.signed_decimal()?;
                self.expect_keyword("step")?;
                let step = self.signed_decimal()?;
                Type::Real { lo, hi, step }
            }
            "enum" => {
                let name = match self.peek() {
                    Tok::Ident(_) => Some(self.ident("enumeration name")?.0),
                    _ => None,
                };
                self.expect(Tok::LBrace)?;
                let mut literals = vec![self.ident("enumeration literal")?.0];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    literals.push(self.ident("enumeration literal")?.0);
                }
                self.expect(Tok::RBrace)?;
                Type::Enum(Arc::new(EnumType { name, literals }))
            }
            other => {
                return Err(SpecError::Syntax {
                    loc,
                    message: format!("unknown type `{other}`"),
                })
            }
        };
        ty.validate()
            .map_err(|message| SpecError::Invalid { loc, message })?;
        Ok(ty)
    }

    fn signed_int(&mut self) -> Result<i128, SpecError> {
        let negative = self.eat_minus();
        let loc = self.loc();
        match self.bump().tok {
            Tok::Int(s) => {
                let text = if negative { format!("-{s}") } else { s };
                text.parse().map_err(|_| SpecError::Invalid {
                    loc,
                    message: format!("integer `{text}` out of range"),
                })
            }
            other => Err(SpecError::Syntax {
                loc,
                message: format!("expected an integer, found {}", other.describe()),
            }),
        }
    }

    fn signed_decimal(&mut self) -> Result<num_rational::BigRational, SpecError> {
        let negative = self.eat_minus();
        let loc = self.loc();
        match self.bump().tok {
            Tok::Int(s) | Tok::Real(s) => {
                let r = parse_decimal(&s).expect("lexer produced a decimal");
                Ok(if negative { -r } else { r })
            }
            other => Err(SpecError::Syntax {
                loc,
                message: format!("expected a number, found {}", other.describe()),
            }),
        }
    }

    fn eat_minus(&mut self) -> bool {
        if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        }
    }

    // expr := and ('||' and)*
    fn expr(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Expr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.relation()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            let rhs = self.relation()?;
            lhs = Expr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn rel_op(&mut self) -> Option<RelOp> {
        Some(match self.peek() {
            Tok::Lt => RelOp::Lt,
            Tok::Le => RelOp::Le,
            Tok::EqEq => RelOp::Eq,
            Tok::Ge => RelOp::Ge,
            Tok::Gt => RelOp::Gt,
            Tok::Ne => RelOp::Ne,
            _ => return None,
        })
    }

    fn relation(&mut self) -> Result<Expr, SpecError> {
        let lhs = self.additive()?;
        let Some(op) = self.rel_op() else {
            return Ok(lhs);
        };
        self.bump();
        let rhs = self.additive()?;
        if self.rel_op().is_some() {
            return Err(self.syntax("comparison operators cannot be chained".into()));
        }
        Ok(Expr::rel(lhs, op, rhs))
    }

    fn additive(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::arith(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, SpecError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::arith(ArithOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SpecError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Expr::not(self.unary()?))
            }
            Tok::Minus => {
                let loc = self.loc();
                self.bump();
                Ok(match self.unary()? {
                    Expr::Const(Value::Int(i)) => {
                        Expr::int(i.checked_neg().ok_or_else(|| SpecError::Invalid {
                            loc,
                            message: "integer literal out of range".into(),
                        })?)
                    }
                    Expr::Const(Value::Real(r)) => Expr::Const(Value::Real(-r)),
                    e => Expr::arith(ArithOp::Sub, Expr::int(0), e),
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr, SpecError> {
        let loc = self.loc();
        match self.bump().tok {
            Tok::Int(s) => s.parse().map(Expr::int).map_err(|_| SpecError::Invalid {
                loc,
                message: format!("integer literal `{s}` out of range"),
            }),
            Tok::Real(s) => Ok(Expr::Const(Value::Real(
                parse_decimal(&s).expect("decimal"),
            ))),
            Tok::Char(c) => Ok(Expr::Const(Value::Char(c))),
            Tok::Str(s) => Ok(Expr::Const(Value::Str(s))),
            Tok::Ident(s) if s == "true" => Ok(Expr::bool(true)),
            Tok::Ident(s) if s == "false" => Ok(Expr::bool(false)),
            Tok::Ident(s) if s == "ITE" => {
                self.expect(Tok::LParen)?;
                self.depth += 1;
                let g = self.expr()?;
                self.expect(Tok::Comma)?;
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.depth -= 1;
                self.expect(Tok::RParen)?;
                Ok(Expr::ite(g, a, b))
            }
            Tok::Ident(s) => Ok(Expr::Var(s)),
            Tok::LParen => {
                self.depth += 1;
                let e = self.expr()?;
                self.depth -= 1;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            other => Err(SpecError::Syntax {
                loc,
                message: format!("expected an expression, found {}", other.describe()),
            }),
        }
    }
}

fn parse_location(raw: &str) -> Option<SourceLocation> {
    let mut parts = raw.rsplitn(3, ':');
    let col: u32 = parts.next()?.trim().parse().ok()?;
    let line: u32 = parts.next()?.trim().parse().ok()?;
    let file = parts.next()?.trim();
    if file.is_empty() || line == 0 || col == 0 {
        return None;
    }
    Some(SourceLocation::new(file, line, col))
}

/// Literal name -> the distinct enumeration types declaring it.
fn enum_literals(spec: &FunctionSpec) -> BTreeMap<String, Vec<Arc<EnumType>>> {
    let mut map: BTreeMap<String, Vec<Arc<EnumType>>> = BTreeMap::new();
    for p in &spec.params {
        if let Type::Enum(e) = &p.ty {
            for lit in &e.literals {
                let entry = map.entry(lit.clone()).or_default();
                if !entry.iter().any(|t| t == e) {
                    entry.push(e.clone());
                }
            }
        }
    }
    map
}

fn check_literal_clashes(spec: &FunctionSpec) -> Result<(), SpecError> {
    let literals = enum_literals(spec);
    for p in &spec.params {
        if literals.contains_key(&p.name) {
            return Err(SpecError::Invalid {
                loc: p.loc.clone(),
                message: format!("parameter `{}` shadows an enumeration literal", p.name),
            });
        }
    }
    Ok(())
}

/// Turns identifiers naming enumeration literals into constants.
fn resolve(
    expr: Expr,
    spec: &FunctionSpec,
    literals: &BTreeMap<String, Vec<Arc<EnumType>>>,
    loc: &SourceLocation,
) -> Result<Expr, SpecError> {
    let r = |e: Box<Expr>| resolve(*e, spec, literals, loc).map(Box::new);
    Ok(match expr {
        Expr::Var(name) if spec.param(&name).is_none() => match literals.get(&name) {
            Some(types) if types.len() == 1 => {
                let ty = types[0].clone();
                let ordinal = ty.ordinal(&name).expect("literal of its own type");
                Expr::Const(Value::Enum(EnumValue { ty, ordinal }))
            }
            Some(_) => {
                return Err(SpecError::Invalid {
                    loc: loc.clone(),
                    message: format!("enumeration literal `{name}` is ambiguous"),
                })
            }
            None => Expr::Var(name),
        },
        e @ (Expr::Var(_) | Expr::Const(_)) => e,
        Expr::Not(e) => Expr::Not(r(e)?),
        Expr::And(a, b) => Expr::And(r(a)?, r(b)?),
        Expr::Or(a, b) => Expr::Or(r(a)?, r(b)?),
        Expr::Arith(op, a, b) => Expr::Arith(op, r(a)?, r(b)?),
        Expr::Pred(mut p) => {
            p.lhs = r(p.lhs)?;
            p.rhs = r(p.rhs)?;
            Expr::Pred(p)
        }
        Expr::Ite(g, a, b) => Expr::Ite(r(g)?, r(a)?, r(b)?),
    })
}

fn check_requirement(
    expr: &Expr,
    spec: &FunctionSpec,
    is_pre: bool,
    loc: &SourceLocation,
) -> Result<(), SpecError> {
    let kind = typecheck(expr, spec as &dyn Scope).map_err(|source| SpecError::Type {
        loc: loc.clone(),
        source,
    })?;
    if kind != Kind::Bool {
        return Err(SpecError::Invalid {
            loc: loc.clone(),
            message: format!("requirement must be Boolean, found {kind}"),
        });
    }
    if is_pre {
        for var in expr.free_vars() {
            let param = spec.param(&var).expect("type checked");
            if !param.direction.is_input() {
                return Err(SpecError::Invalid {
                    loc: loc.clone(),
                    message: format!("precondition refers to output `{var}`"),
                });
            }
        }
    }
    Ok(())
}
