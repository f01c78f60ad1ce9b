use std::fmt::Write;

use super::FunctionSpec;
use crate::expr::{format_decimal, Type};

/// Renders a function in `.reqspec` form. Every declaration is preceded by an
/// explicit `@` location so that parsing the output reproduces `spec`,
/// source locations included.
pub fn print(spec: &FunctionSpec) -> String {
    let mut out = String::new();
    writeln!(out, "function {}", spec.name).unwrap();
    for p in &spec.params {
        writeln!(out, "  @ {}", p.loc).unwrap();
        writeln!(
            out,
            "  {} {}: {}",
            p.direction.keyword(),
            p.name,
            type_text(&p.ty)
        )
        .unwrap();
    }
    for (kw, reqs) in [("pre", &spec.pre), ("post", &spec.post)] {
        for r in reqs {
            writeln!(out, "  @ {}", r.loc).unwrap();
            writeln!(out, "  {kw}: {}", r.expr).unwrap();
        }
    }
    out
}

/// Renders several specs as one document, separated by blank lines.
pub fn print_all(specs: &[FunctionSpec]) -> String {
    specs.iter().map(print).collect::<Vec<_>>().join("\n")
}

pub(crate) fn type_text(ty: &Type) -> String {
    match ty {
        Type::Bool => "bool".into(),
        Type::Char => "char".into(),
        Type::Str => "string".into(),
        Type::Int { lo, hi } => format!("int range {lo} .. {hi}"),
        Type::Real { lo, hi, step } => format!(
            "real range {} .. {} step {}",
            format_decimal(lo),
            format_decimal(hi),
            format_decimal(step)
        ),
        Type::Enum(e) => match &e.name {
            Some(name) => format!("enum {name} {{{}}}", e.literals.join(", ")),
            None => format!("enum {{{}}}", e.literals.join(", ")),
        },
    }
}
