use std::fmt;

use crate::ast::Span;
use crate::parser::ParseError;

/// Prefix reserved for tags introduced by desugaring.
pub const RESERVED_TAG_PREFIX: &str = "$t";

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Kw(&'static str),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Int(i) => write!(f, "integer `{i}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

const KEYWORDS: &[&str] = &[
    "interface",
    "class",
    "begin",
    "end",
    "with",
    "op",
    "var",
    "in",
    "out",
    "implements",
    "inherits",
    "await",
    "if",
    "then",
    "else",
    "while",
    "do",
    "new",
    "true",
    "false",
    "null",
    "nil",
    "now",
    "this",
    "skip",
];

// Longest first.
const SYMBOLS: &[&str] = &[
    ":=", "==", "/=", "<=", ">=", "|-", "&&", "||", "[]", ":", ";", ",", ".", "(", ")", "[", "]",
    "{", "}", "!", "?", "=", "<", ">", "+", "-", "*", "/", "%", "~", "#",
];

pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let text = source.replace("\r\n", "\n").replace('\r', "\n");
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let span = Span::new(line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let lit: String = chars[start..i].iter().collect();
            let n = lit
                .parse()
                .map_err(|_| ParseError::new(span, format!("integer literal `{lit}` out of range")))?;
            out.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Kw(k),
                None => Tok::Ident(word),
            };
            out.push(Token { tok, span });
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(ParseError::new(span, "unterminated string literal")),
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        let esc = match chars.get(i) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(&other) => other,
                            None => return Err(ParseError::new(span, "unterminated string literal")),
                        };
                        s.push(esc);
                        bump!();
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            out.push(Token { tok: Tok::Str(s), span });
            continue;
        }
        if c == '$' {
            return Err(ParseError::new(
                span,
                format!("`$` is reserved for generated names (such as `{RESERVED_TAG_PREFIX}0`)"),
            ));
        }
        let sym = SYMBOLS.iter().find(|s| {
            s.chars()
                .enumerate()
                .all(|(k, sc)| chars.get(i + k) == Some(&sc))
        });
        match sym {
            Some(s) => {
                for _ in 0..s.chars().count() {
                    bump!();
                }
                out.push(Token { tok: Tok::Sym(s), span });
            }
            None => return Err(ParseError::new(span, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}
