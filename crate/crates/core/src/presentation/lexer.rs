use num_bigint::BigInt;

use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Colon,
    Arrow,
    Star,
    Plus,
    Minus,
    Slash,
    Equals,
    LParen,
    RParen,
    LBracket,
    RBracket,
    /// newline or `;`
    Sep,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Equals => "`=`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Sep => "end of statement".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

/// Integer literals longer than this are rejected outright.
const MAX_DIGITS: usize = 512;

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&(_, c)) = chars.peek() {
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, column: tc });
        match c {
            '\n' => {
                chars.next();
                push(&mut out, Tok::Sep);
                line += 1;
                col = 1;
            }
            ';' => {
                chars.next();
                col += 1;
                push(&mut out, Tok::Sep);
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                if s.len() > MAX_DIGITS {
                    return Err(ParseError { line: tl, column: tc, message: "integer literal too long".into(), expected: vec![] });
                }
                push(&mut out, Tok::Int(s.parse().expect("digits")));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !(d.is_alphanumeric() || d == '_' || d == '\'') {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                push(&mut out, Tok::Ident(s));
            }
            _ => {
                chars.next();
                col += 1;
                let tok = match c {
                    ':' => Tok::Colon,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    '/' => Tok::Slash,
                    '=' => Tok::Equals,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    '-' => {
                        if let Some(&(_, '>')) = chars.peek() {
                            chars.next();
                            col += 1;
                            Tok::Arrow
                        } else {
                            Tok::Minus
                        }
                    }
                    '\r' => continue,
                    other => {
                        return Err(ParseError {
                            line: tl,
                            column: tc,
                            message: format!("unexpected character {other:?}"),
                            expected: vec![],
                        })
                    }
                };
                push(&mut out, tok);
            }
        }
    }
    Ok(out)
}
