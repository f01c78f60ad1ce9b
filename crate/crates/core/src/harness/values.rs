use num_rational::BigRational;
use serde_json::{Number, Value as Json};

use crate::expr::{format_decimal, parse_decimal, rational_to_i128, EnumValue, Type, Value};

/// Text form used in vector files.
pub fn value_text(value: &Value) -> String {
    value.to_string()
}

/// Inverse of [`value_text`] for a value of type `ty`. Range membership is
/// not checked.
pub fn parse_value(text: &str, ty: &Type) -> Option<Value> {
    match ty {
        Type::Bool => match text {
            "true" => Some(Value::Bool(true)),
            "false" => Some(Value::Bool(false)),
            _ => None,
        },
        Type::Int { .. } => rational_to_i128(&parse_decimal(text)?).map(Value::Int),
        Type::Real { .. } => parse_decimal(text).map(Value::Real),
        Type::Enum(e) => e.ordinal(text).map(|ordinal| {
            Value::Enum(EnumValue {
                ty: e.clone(),
                ordinal,
            })
        }),
        Type::Char => {
            let mut chars = text.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Some(Value::Char(c)),
                _ => None,
            }
        }
        Type::Str => Some(Value::Str(text.to_string())),
    }
}

/// JSON form used on the implementation protocol: numbers for numeric
/// types, strings for enumeration literals, characters and strings.
pub fn value_to_json(value: &Value) -> Json {
    match value {
        Value::Bool(b) => Json::Bool(*b),
        Value::Int(i) => number(&i.to_string()),
        Value::Real(r) => real_json(r),
        Value::Enum(e) => Json::String(e.literal().to_string()),
        Value::Char(c) => Json::String(c.to_string()),
        Value::Str(s) => Json::String(s.clone()),
    }
}

fn real_json(r: &BigRational) -> Json {
    let text = format_decimal(r);
    if text.contains('/') {
        Json::String(text)
    } else {
        number(&text)
    }
}

fn number(text: &str) -> Json {
    Json::Number(
        text.parse::<Number>()
            .expect("decimal text is a JSON number"),
    )
}

/// Reads a value of type `ty` from its JSON form. Range membership is not
/// checked.
pub fn value_from_json(json: &Json, ty: &Type) -> Option<Value> {
    match (ty, json) {
        (Type::Bool, Json::Bool(b)) => Some(Value::Bool(*b)),
        (Type::Int { .. } | Type::Real { .. }, Json::Number(n)) => {
            parse_value(&plain_decimal(&n.to_string())?, ty)
        }
        (Type::Enum(_) | Type::Char | Type::Str, Json::String(s)) => parse_value(s, ty),
        _ => None,
    }
}

/// Rewrites JSON number text with an exponent into plain decimal notation.
fn plain_decimal(text: &str) -> Option<String> {
    let Some((mantissa, exp)) = text.split_once(['e', 'E']) else {
        return Some(text.to_string());
    };
    let exp: i32 = exp.parse().ok()?;
    let m = parse_decimal(mantissa)?;
    let scale = BigRational::from_integer(num_bigint::BigInt::from(10).pow(exp.unsigned_abs()));
    let r = if exp >= 0 { m * scale } else { m / scale };
    Some(format_decimal(&r))
}
