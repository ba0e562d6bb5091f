//! Tokenizer for the script subset.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Num(f64),
    LParen,
    RParen,
    Comma,
    Semi,
    Other(char),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LexError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Default)]
pub(crate) struct Lexed {
    pub tokens: Vec<Token>,
    /// Set when lexing stopped early; `tokens` holds everything before it.
    pub error: Option<LexError>,
}

pub(crate) fn lex(src: &str) -> Lexed {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Lexed::default();
    let mut i = 0;
    let mut line = 1;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' | ')' | ',' | ';' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    _ => Tok::Semi,
                };
                out.tokens.push(Token { tok, line });
                i += 1;
            }
            '"' => {
                let start_line = line;
                let mut s = String::new();
                i += 1;
                let mut closed = false;
                while i < chars.len() {
                    match chars[i] {
                        '"' => {
                            closed = true;
                            i += 1;
                            break;
                        }
                        '\\' if i + 1 < chars.len() => {
                            s.push(chars[i + 1]);
                            i += 2;
                        }
                        ch => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                if !closed {
                    out.error = Some(LexError {
                        line: start_line,
                        message: "unterminated string literal".to_string(),
                    });
                    return out;
                }
                out.tokens.push(Token {
                    tok: Tok::Str(s),
                    line: start_line,
                });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.tokens.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                });
            }
            c if starts_number(&chars, i) => {
                let start = i;
                if c == '-' || c == '+' {
                    i += 1;
                }
                eat_digits(&chars, &mut i);
                if chars.get(i) == Some(&'.') {
                    i += 1;
                    eat_digits(&chars, &mut i);
                }
                if matches!(chars.get(i), Some('e' | 'E')) {
                    let mut j = i + 1;
                    if matches!(chars.get(j), Some('+' | '-')) {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                        i = j;
                        eat_digits(&chars, &mut i);
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let tok = match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Tok::Num(v),
                    _ => Tok::Other('#'),
                };
                out.tokens.push(Token { tok, line });
            }
            other => {
                out.tokens.push(Token {
                    tok: Tok::Other(other),
                    line,
                });
                i += 1;
            }
        }
    }
    out
}

fn starts_number(chars: &[char], i: usize) -> bool {
    let digit_at = |k: usize| chars.get(k).is_some_and(|c| c.is_ascii_digit());
    let mut k = i;
    if matches!(chars[k], '-' | '+') {
        k += 1;
    }
    digit_at(k) || (chars.get(k) == Some(&'.') && digit_at(k + 1))
}

fn eat_digits(chars: &[char], i: &mut usize) {
    while *i < chars.len() && chars[*i].is_ascii_digit() {
        *i += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_statement() {
        assert_eq!(
            toks(r#"createobject("/source", "S1", -1.5, .5, 2e1);"#),
            vec![
                Tok::Ident("createobject".into()),
                Tok::LParen,
                Tok::Str("/source".into()),
                Tok::Comma,
                Tok::Str("S1".into()),
                Tok::Comma,
                Tok::Num(-1.5),
                Tok::Comma,
                Tok::Num(0.5),
                Tok::Comma,
                Tok::Num(20.0),
                Tok::RParen,
                Tok::Semi,
            ]
        );
    }

    #[test]
    fn comments_and_lines() {
        let lexed = lex("// header ; not a statement\nfoo;\n\"x\\\"y\"");
        let lines: Vec<usize> = lexed.tokens.iter().map(|t| t.line).collect();
        assert_eq!(lines, vec![2, 2, 3]);
        assert_eq!(lexed.tokens[2].tok, Tok::Str("x\"y".into()));
    }

    #[test]
    fn unterminated_string_stops() {
        let lexed = lex("a;\nb(\"oops");
        assert_eq!(lexed.tokens.len(), 4);
        assert_eq!(lexed.error.unwrap().line, 2);
    }
}
