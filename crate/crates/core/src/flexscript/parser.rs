//! Statement-level parser with panic-mode recovery.
//!
//! The source is split into `;`-terminated statements. Each one is matched
//! against the four-statement vocabulary independently; a statement that does
//! not match is counted, reported, and skipped.

use std::collections::HashSet;

use super::ast::{
    Connection, Diagnostic, ObjType, ObjectDecl, ParamAssignment, ParamValue, ParseError, PortKind,
    Script,
};
use super::dist::parse_call_tokens;
use super::lexer::{lex, Tok, Token};

enum Stmt {
    Decl(ObjectDecl),
    Param(ParamAssignment),
    Connect(Connection),
}

/// Parses script text. Never fails: problems are recorded on the returned
/// [`Script`].
pub fn parse(source: &str) -> Script {
    let lexed = lex(source);
    let mut script = Script::default();
    let mut declared: HashSet<String> = HashSet::new();
    let mut references: Vec<(usize, String)> = Vec::new();

    let mut segments: Vec<&[Token]> = lexed.tokens.split(|t| t.tok == Tok::Semi).collect();
    // With a lexing error, the tail after the last `;` is cut short; drop it.
    if lexed.error.is_some() {
        segments.pop();
    }

    for seg in segments.into_iter().filter(|s| !s.is_empty()) {
        let line = seg[0].line;
        let toks: Vec<&Tok> = seg.iter().map(|t| &t.tok).collect();
        match parse_statement(&toks) {
            Ok(stmt) => {
                script.recognized_statements += 1;
                match stmt {
                    Stmt::Decl(decl) => {
                        if declared.insert(decl.obj_name.clone()) {
                            script.decls.push(decl);
                        } else {
                            script.diagnostics.push(Diagnostic::DuplicateDeclaration {
                                name: decl.obj_name,
                                line,
                            });
                        }
                    }
                    Stmt::Param(p) => {
                        references.push((line, p.obj_name.clone()));
                        script.params.push(p);
                    }
                    Stmt::Connect(c) => {
                        references.push((line, c.from_name.clone()));
                        references.push((line, c.to_name.clone()));
                        script.connections.push(c);
                    }
                }
            }
            Err(message) => {
                script.unknown_statements += 1;
                script.parse_errors.push(ParseError { line, message });
            }
        }
    }

    if let Some(err) = lexed.error {
        script.parse_errors.push(ParseError {
            line: err.line,
            message: err.message,
        });
    }

    let mut reported = HashSet::new();
    for (line, name) in references {
        if !declared.contains(&name) && reported.insert(name.clone()) {
            script
                .diagnostics
                .push(Diagnostic::DanglingReference { name, line });
        }
    }
    script
}

struct Cursor<'a> {
    toks: &'a [&'a Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).copied();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok) -> Result<(), String> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(format!("expected {}, found {}", describe(want), describe(t))),
            None => Err(format!("expected {}, found end of statement", describe(want))),
        }
    }

    fn string(&mut self) -> Result<&'a str, String> {
        match self.next() {
            Some(Tok::Str(s)) => Ok(s),
            other => Err(format!("expected string literal, found {}", describe_opt(other))),
        }
    }

    fn number(&mut self) -> Result<f64, String> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(*v),
            other => Err(format!("expected number, found {}", describe_opt(other))),
        }
    }

    /// Bare identifier or quoted string.
    fn name(&mut self) -> Result<String, String> {
        match self.next() {
            Some(Tok::Ident(s)) | Some(Tok::Str(s)) if !s.is_empty() => Ok(s.clone()),
            other => Err(format!("expected object name, found {}", describe_opt(other))),
        }
    }

    fn rest(&self) -> &'a [&'a Tok] {
        &self.toks[self.pos.min(self.toks.len())..]
    }

    fn finish(&self) -> Result<(), String> {
        match self.toks.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(format!("unexpected {} after statement", describe(t))),
        }
    }
}

fn parse_statement(toks: &[&Tok]) -> Result<Stmt, String> {
    let mut cur = Cursor { toks, pos: 0 };
    let keyword = match cur.next() {
        Some(Tok::Ident(k)) => k.as_str(),
        Some(t) => return Err(format!("unrecognized statement starting with {}", describe(t))),
        None => return Err("empty statement".to_string()),
    };
    let stmt = match keyword {
        "createobject" => {
            cur.expect(&Tok::LParen)?;
            let ty = cur.string()?;
            let obj_type: ObjType = ty.parse()?;
            cur.expect(&Tok::Comma)?;
            let obj_name = cur.string()?.to_string();
            if obj_name.is_empty() {
                return Err("object name must be nonempty".to_string());
            }
            let mut position = [0.0; 3];
            for p in &mut position {
                cur.expect(&Tok::Comma)?;
                *p = cur.number()?;
            }
            cur.expect(&Tok::RParen)?;
            Stmt::Decl(ObjectDecl {
                obj_type,
                obj_name,
                position,
            })
        }
        "setparam" => {
            cur.expect(&Tok::LParen)?;
            let obj_name = cur.name()?;
            cur.expect(&Tok::Comma)?;
            let param_name = cur.string()?.to_string();
            if param_name.is_empty() {
                return Err("parameter name must be nonempty".to_string());
            }
            cur.expect(&Tok::Comma)?;
            let value = parse_value(&mut cur)?;
            cur.expect(&Tok::RParen)?;
            Stmt::Param(ParamAssignment {
                obj_name,
                param_name,
                value,
            })
        }
        "contextdragconnection" => {
            cur.expect(&Tok::LParen)?;
            let from_name = cur.name()?;
            cur.expect(&Tok::Comma)?;
            let to_name = cur.name()?;
            cur.expect(&Tok::Comma)?;
            let port_kind = match cur.string()? {
                "A" => PortKind::Flow,
                "S" => PortKind::Center,
                other => return Err(format!("port kind must be \"A\" or \"S\", found \"{other}\"")),
            };
            cur.expect(&Tok::RParen)?;
            if port_kind == PortKind::Flow && from_name == to_name {
                return Err(format!("flow connection from `{from_name}` to itself"));
            }
            Stmt::Connect(Connection {
                from_name,
                to_name,
                port_kind,
            })
        }
        other => return Err(format!("unrecognized statement `{other}`")),
    };
    cur.finish()?;
    Ok(stmt)
}

fn parse_value(cur: &mut Cursor<'_>) -> Result<ParamValue, String> {
    if let Some(Tok::Num(v)) = cur.rest().first() {
        cur.pos += 1;
        return Ok(ParamValue::Scalar(*v));
    }
    let owned: Vec<Tok> = cur.rest().iter().map(|t| (*t).clone()).collect();
    match parse_call_tokens(&owned) {
        Some((Ok(dist), used)) => {
            cur.pos += used;
            Ok(ParamValue::Dist(dist))
        }
        Some((Err(e), _)) => Err(e.to_string()),
        None => Err(format!(
            "expected number or distribution, found {}",
            describe_opt(cur.rest().first().copied())
        )),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Str(s) => format!("\"{s}\""),
        Tok::Num(v) => format!("{v}"),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::Comma => "`,`".to_string(),
        Tok::Semi => "`;`".to_string(),
        Tok::Other(c) => format!("`{c}`"),
    }
}

fn describe_opt(t: Option<&Tok>) -> String {
    t.map(describe).unwrap_or_else(|| "end of statement".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flexscript::dist::Family;

    #[test]
    fn single_decl() {
        let s = parse(r#"createobject("/source", "Source1", 0, 0, 0);"#);
        assert_eq!(s.decls.len(), 1);
        assert_eq!(s.decls[0].obj_type, ObjType::Source);
        assert_eq!(s.decls[0].obj_name, "Source1");
        assert!(s.parse_errors.is_empty());
    }

    #[test]
    fn connection_statement() {
        let s = parse(r#"contextdragconnection(Source1, Queue1, "A");"#);
        assert_eq!(
            s.connections,
            vec![Connection {
                from_name: "Source1".into(),
                to_name: "Queue1".into(),
                port_kind: PortKind::Flow
            }]
        );
        // Both endpoints are undeclared here.
        assert_eq!(s.dangling_references(), vec!["Source1", "Queue1"]);
    }

    #[test]
    fn quoted_and_bare_names_normalize() {
        let a = parse(r#"contextdragconnection("Source1", "Queue1", "S");"#);
        let b = parse(r#"contextdragconnection(Source1, Queue1, "S");"#);
        assert_eq!(a.connections, b.connections);
    }

    #[test]
    fn garbage_then_decl() {
        let s = parse(r#"garbage tokens ; createobject("/sink","Sink1",9,0,0);"#);
        assert_eq!(s.decls.len(), 1);
        assert_eq!(s.unknown_statements, 1);
        assert_eq!(s.recognized_statements, 1);
        assert_eq!(s.parse_errors.len(), 1);
    }

    #[test]
    fn trailing_statement_without_semicolon() {
        let s = parse(r#"createobject("/source","source1",0,0,0)"#);
        assert_eq!(s.decls[0].obj_name, "source1");
    }

    #[test]
    fn case_sensitive_names() {
        let a = parse(r#"createobject("/source","source1",0,0,0)"#);
        let b = parse(r#"createobject("/source","Source1",0,0,0)"#);
        assert_ne!(a.decls[0], b.decls[0]);
    }

    #[test]
    fn setparam_values() {
        let s = parse(
            "setparam(Source1, \"InterArrivalTime\", Exponential(10));\n\
             setparam(Queue1, \"Capacity\", 5);\n\
             setparam(P1, \"ProcessTime\", triangular(2, 5, 3));",
        );
        assert_eq!(s.params.len(), 2);
        assert_eq!(
            s.params[0].value,
            ParamValue::Dist(crate::flexscript::DistributionExpr {
                family: Family::Exponential,
                args: vec![10.0]
            })
        );
        assert_eq!(s.params[1].value, ParamValue::Scalar(5.0));
        assert_eq!(s.unknown_statements, 1);
        assert_eq!(s.parse_errors[0].line, 3);
    }

    #[test]
    fn duplicate_declaration_first_wins() {
        let s = parse(
            r#"createobject("/queue","Q",0,0,0); createobject("/processor","Q",1,0,0);"#,
        );
        assert_eq!(s.decls.len(), 1);
        assert_eq!(s.decls[0].obj_type, ObjType::Queue);
        assert_eq!(s.recognized_statements, 2);
        assert!(matches!(
            s.diagnostics[0],
            Diagnostic::DuplicateDeclaration { .. }
        ));
    }

    #[test]
    fn rejects_bad_forms() {
        for src in [
            r#"createobject("/widget","W",0,0,0);"#,
            r#"createobject("/queue","",0,0,0);"#,
            r#"createobject("/queue","Q",0,0);"#,
            r#"contextdragconnection(A, A, "A");"#,
            r#"contextdragconnection(A, B, "X");"#,
            r#"setparam(A, "P", exponential(1)) extra;"#,
        ] {
            let s = parse(src);
            assert_eq!(s.unknown_statements, 1, "{src}");
            assert_eq!(s.recognized_statements, 0, "{src}");
        }
        // Center self-binding is allowed syntactically.
        assert_eq!(parse(r#"contextdragconnection(A, A, "S");"#).unknown_statements, 0);
    }

    #[test]
    fn unterminated_string_truncates() {
        let s = parse("createobject(\"/sink\",\"Sink1\",0,0,0);\ncreateobject(\"/queue\", \"Q");
        assert_eq!(s.decls.len(), 1);
        assert_eq!(s.parse_errors.len(), 1);
        assert_eq!(s.parse_errors[0].line, 2);
        assert_eq!(s.unknown_statements, 0);
    }

    #[test]
    fn missing_semicolons_yield_nothing() {
        let s = parse(
            "createobject(\"/source\",\"S\",0,0,0)\ncreateobject(\"/sink\",\"K\",1,0,0)\ncontextdragconnection(S, K, \"A\")",
        );
        assert!(s.is_empty());
        assert_eq!(s.unknown_statements, 1);
    }
}
