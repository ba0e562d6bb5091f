use std::fmt::Write;

use thiserror::Error;

use super::ast::Script;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("script has {0} parse error(s)")]
    HasParseErrors(usize),
    #[error("reference to undeclared object `{0}`")]
    DanglingReference(String),
}

/// Serializes a script deterministically: declarations, then parameters,
/// then connections, one statement per line.
pub fn emit_canonical(script: &Script) -> Result<String, EmitError> {
    if !script.parse_errors.is_empty() {
        return Err(EmitError::HasParseErrors(script.parse_errors.len()));
    }
    let declared = |name: &str| script.decls.iter().any(|d| d.obj_name == name);
    let referenced = script
        .params
        .iter()
        .map(|p| p.obj_name.as_str())
        .chain(
            script
                .connections
                .iter()
                .flat_map(|c| [c.from_name.as_str(), c.to_name.as_str()]),
        );
    for name in referenced {
        if !declared(name) {
            return Err(EmitError::DanglingReference(name.to_string()));
        }
    }

    let mut out = String::new();
    for d in &script.decls {
        let [x, y, z] = d.position;
        let _ = writeln!(
            out,
            "createobject({}, {}, {x}, {y}, {z});",
            quote(d.obj_type.path()),
            quote(&d.obj_name)
        );
    }
    for p in &script.params {
        let _ = writeln!(
            out,
            "setparam({}, {}, {});",
            name_ref(&p.obj_name),
            quote(&p.param_name),
            p.value
        );
    }
    for c in &script.connections {
        let _ = writeln!(
            out,
            "contextdragconnection({}, {}, {});",
            name_ref(&c.from_name),
            name_ref(&c.to_name),
            quote(c.port_kind.code())
        );
    }
    Ok(out)
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for ch in s.chars() {
        if ch == '"' || ch == '\\' {
            q.push('\\');
        }
        q.push(ch);
    }
    q.push('"');
    q
}

/// Bare when the name is a plain identifier, quoted otherwise.
fn name_ref(name: &str) -> String {
    let mut chars = name.chars();
    let ident = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ident {
        name.to_string()
    } else {
        quote(name)
    }
}
