//! Small tokenizer shared by the four surface grammars (.kb, .frm, .ers, .oos).

use std::fmt;

use crate::error::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(u64),
    /// Punctuation, including the two-character `<=` and `..`.
    Punct(&'static str),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Punct(p) => write!(f, "`{p}`"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Which extra characters may continue an identifier.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct LexMode {
    /// `Cardinality.Min` style names (frame grammar).
    pub dotted: bool,
    /// `type-is`, `Set-of` style names (object-oriented grammar).
    pub hyphenated: bool,
}

const PUNCT2: [&str; 2] = ["<=", ".."];
const PUNCT1: [&str; 10] = [";", ",", ":", "(", ")", ".", "*", "[", "]", "="];

pub(crate) fn tokenize(src: &str, mode: LexMode) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while i < chars.len() {
                let ch = chars[i];
                let joins = |sep: char, on: bool| {
                    on && ch == sep && chars.get(i + 1).is_some_and(|n| n.is_ascii_alphanumeric())
                };
                if ch.is_ascii_alphanumeric() || ch == '_' || joins('.', mode.dotted) || joins('-', mode.hyphenated) {
                    s.push(ch);
                    i += 1;
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token { tok: Tok::Ident(s), line: start_line, col: start_col });
            continue;
        }
        if c.is_ascii_digit() {
            let mut n: u64 = 0;
            while i < chars.len() && chars[i].is_ascii_digit() {
                n = n
                    .checked_mul(10)
                    .and_then(|n| n.checked_add(chars[i].to_digit(10).unwrap() as u64))
                    .ok_or_else(|| SyntaxError::new(start_line, start_col, "number too large"))?;
                i += 1;
                col += 1;
            }
            out.push(Token { tok: Tok::Num(n), line: start_line, col: start_col });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        if let Some(p) = PUNCT2.iter().find(|p| **p == two) {
            out.push(Token { tok: Tok::Punct(p), line: start_line, col: start_col });
            i += 2;
            col += 2;
            continue;
        }
        if let Some(p) = PUNCT1.iter().find(|p| p.starts_with(c)) {
            out.push(Token { tok: Tok::Punct(p), line: start_line, col: start_col });
            i += 1;
            col += 1;
            continue;
        }
        return Err(SyntaxError::new(start_line, start_col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Cursor over a token stream with the helpers every recursive-descent parser here needs.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Cursor {
    pub fn new(src: &str, mode: LexMode) -> Result<Self, SyntaxError> {
        let toks = tokenize(src, mode)?;
        let lines = src.split('\n').count();
        let last_col = src.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Ok(Cursor { toks, pos: 0, end: (lines, last_col) })
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn position(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    pub fn error(&self, msg: impl Into<String>) -> SyntaxError {
        let (line, col) = self.position();
        SyntaxError::new(line, col, msg)
    }

    fn found(&self) -> String {
        self.peek().map_or_else(|| "end of input".to_string(), |t| t.to_string())
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    pub fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`, found {}", self.found())))
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), SyntaxError> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`, found {}", self.found())))
        }
    }

    /// Takes an identifier that is not one of `reserved`.
    pub fn expect_ident(&mut self, what: &str, reserved: &[&str]) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !reserved.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}, found {}", self.found()))),
        }
    }

    pub fn expect_num(&mut self, what: &str) -> Result<u64, SyntaxError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(format!("expected {what}, found {}", self.found()))),
        }
    }
}
