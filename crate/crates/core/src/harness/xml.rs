use std::collections::BTreeMap;
use std::fmt::Write;

use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, XmlVersion};

use super::values::{parse_value, value_text};
use super::{HarnessError, TestVector};
use crate::expr::Environment;
use crate::speclang::FunctionSpec;

/// Serialises vectors of `function`. Equal inputs give identical bytes.
pub fn export_vectors(function: &str, vectors: &[TestVector]) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if vectors.is_empty() {
        writeln!(out, "<testvectors function=\"{}\"/>", attr(function)).unwrap();
        return out;
    }
    writeln!(out, "<testvectors function=\"{}\">", attr(function)).unwrap();
    for v in vectors {
        writeln!(
            out,
            "  <vector id=\"{}\" condition=\"{}\" trace=\"{}\">",
            attr(&v.id),
            attr(&v.condition_id),
            attr(&v.trace)
        )
        .unwrap();
        for (tag, env) in [("input", &v.inputs), ("witness", &v.witness)] {
            for (name, value) in env.iter() {
                writeln!(
                    out,
                    "    <{tag} name=\"{}\" value=\"{}\"/>",
                    attr(name),
                    attr(&value_text(value))
                )
                .unwrap();
            }
        }
        out.push_str("  </vector>\n");
    }
    out.push_str("</testvectors>\n");
    out
}

/// Escapes an attribute value so that it reads back unchanged, including
/// whitespace that attribute normalisation would otherwise fold.
fn attr(text: &str) -> String {
    quick_xml::escape::escape(text)
        .replace('\t', "&#9;")
        .replace('\n', "&#10;")
        .replace('\r', "&#13;")
}

/// Reads a document written by [`export_vectors`] for `spec`, checking that
/// every vector assigns exactly the inputs of `spec`, only outputs of
/// `spec` as witness, and values of the declared types.
pub fn import_vectors(xml: &str, spec: &FunctionSpec) -> Result<Vec<TestVector>, HarnessError> {
    let err = |m: String| HarnessError::Xml(m);
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);

    let mut function: Option<String> = None;
    let mut vectors = Vec::new();
    let mut current: Option<TestVector> = None;
    let mut closed = false;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| err(format!("at byte {}: {e}", reader.buffer_position())))?;
        let (start, empty) = match &event {
            Event::Start(s) => (Some(s), false),
            Event::Empty(s) => (Some(s), true),
            _ => (None, false),
        };
        if let Some(s) = start {
            if closed {
                return Err(err("content after the root element".into()));
            }
            let mut attrs = attributes(s)?;
            let tag = s.name().as_ref().to_string();
            match (tag.as_str(), &function, &current) {
                ("testvectors", None, _) => {
                    let name = take(&mut attrs, "function", &tag)?;
                    if name != spec.name {
                        return Err(err(format!(
                            "vectors are for function `{name}`, not `{}`",
                            spec.name
                        )));
                    }
                    function = Some(name);
                    closed = empty;
                }
                ("vector", Some(f), None) => {
                    let v = TestVector {
                        id: take(&mut attrs, "id", &tag)?,
                        function: f.clone(),
                        condition_id: take(&mut attrs, "condition", &tag)?,
                        trace: take(&mut attrs, "trace", &tag)?,
                        inputs: Environment::new(),
                        witness: Environment::new(),
                    };
                    if vectors.iter().any(|w: &TestVector| w.id == v.id) {
                        return Err(err(format!("duplicate vector id `{}`", v.id)));
                    }
                    if empty {
                        vectors.push(check_vector(v, spec)?);
                    } else {
                        current = Some(v);
                    }
                }
                ("input" | "witness", _, Some(_)) if empty => {
                    let name = take(&mut attrs, "name", &tag)?;
                    let text = take(&mut attrs, "value", &tag)?;
                    let v = current.as_mut().expect("inside a vector");
                    let param = spec.param(&name).ok_or_else(|| {
                        err(format!("vector `{}`: unknown variable `{name}`", v.id))
                    })?;
                    if param.direction.is_input() != (tag == "input") {
                        return Err(err(format!(
                            "vector `{}`: `{name}` is not {}",
                            v.id,
                            if tag == "input" {
                                "an input"
                            } else {
                                "an output"
                            }
                        )));
                    }
                    let value = parse_value(&text, &param.ty).ok_or_else(|| {
                        err(format!(
                            "vector `{}`: `{text}` is not a value of `{name}`",
                            v.id
                        ))
                    })?;
                    let env = if tag == "input" {
                        &mut v.inputs
                    } else {
                        &mut v.witness
                    };
                    if env.bind(name.clone(), value).is_some() {
                        return Err(err(format!("vector `{}`: `{name}` assigned twice", v.id)));
                    }
                }
                _ => return Err(err(format!("unexpected element <{tag}>"))),
            }
            if let Some(extra) = attrs.keys().next() {
                return Err(err(format!("unexpected attribute `{extra}` on <{tag}>")));
            }
            continue;
        }
        match event {
            Event::End(e) => match e.name().as_ref() {
                "vector" => vectors.push(check_vector(current.take().expect("open vector"), spec)?),
                "testvectors" => closed = true,
                _ => {}
            },
            Event::Eof => break,
            Event::Decl(_) | Event::Comment(_) => {}
            Event::Text(t) if t.trim().is_empty() => {}
            other => return Err(err(format!("unexpected content {other:?}"))),
        }
    }
    if !closed {
        return Err(err("missing <testvectors> root element".into()));
    }
    Ok(vectors)
}

/// The `function` attribute of the root element of a vectors document.
pub fn vectors_function(xml: &str) -> Result<String, HarnessError> {
    let mut reader = Reader::from_str(xml);
    loop {
        match reader
            .read_event()
            .map_err(|e| HarnessError::Xml(e.to_string()))?
        {
            Event::Start(s) | Event::Empty(s) if s.name().as_ref() == "testvectors" => {
                return take(&mut attributes(&s)?, "function", "testvectors");
            }
            Event::Start(s) | Event::Empty(s) => {
                return Err(HarnessError::Xml(format!(
                    "unexpected root element <{}>",
                    s.name().as_ref()
                )))
            }
            Event::Eof => {
                return Err(HarnessError::Xml(
                    "missing <testvectors> root element".into(),
                ))
            }
            _ => {}
        }
    }
}

fn attributes(s: &BytesStart) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut out = BTreeMap::new();
    for a in s.attributes() {
        let a = a.map_err(|e| HarnessError::Xml(e.to_string()))?;
        let key = a.key.as_ref().to_string();
        let value = a
            .normalized_value(XmlVersion::Implicit1_0)
            .map_err(|e| HarnessError::Xml(e.to_string()))?
            .into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn take(
    attrs: &mut BTreeMap<String, String>,
    key: &str,
    tag: &str,
) -> Result<String, HarnessError> {
    attrs
        .remove(key)
        .ok_or_else(|| HarnessError::Xml(format!("<{tag}> lacks attribute `{key}`")))
}

fn check_vector(v: TestVector, spec: &FunctionSpec) -> Result<TestVector, HarnessError> {
    if let Some(p) = spec.inputs().find(|p| v.inputs.get(&p.name).is_none()) {
        return Err(HarnessError::Xml(format!(
            "vector `{}` lacks input `{}`",
            v.id, p.name
        )));
    }
    for (name, value) in v.inputs.iter().chain(v.witness.iter()) {
        let ty = &spec.param(name).expect("checked on read").ty;
        if !ty.contains(value) {
            return Err(HarnessError::Xml(format!(
                "vector `{}`: {name} = {value} lies outside its type",
                v.id
            )));
        }
    }
    Ok(v)
}
