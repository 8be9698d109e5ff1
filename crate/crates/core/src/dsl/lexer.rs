use std::fmt;

use super::ast::Pos;
use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    /// Decimal literal; `imag` when written with a trailing `i`.
    Number { text: String, imag: bool },
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Eq,
    Star,
    Arrow,
    Plus,
    Minus,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number { text, imag } => write!(f, "`{text}{}`", if *imag { "i" } else { "" }),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    pub end: Pos,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn pos(&mut self) -> Pos {
        let offset = self.chars.peek().map_or(self.src.len(), |&(i, _)| i);
        Pos { line: self.line, col: self.col, offset }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, out: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor { chars: src.char_indices().peekable(), src, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        while let Some(c) = cur.peek() {
            if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else if c.is_whitespace() {
                cur.bump();
            } else {
                break;
            }
        }
        let pos = cur.pos();
        let Some(c) = cur.peek() else {
            out.push(Token { tok: Tok::Eof, pos, end: pos });
            return Ok(out);
        };
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            cur.take_while(&mut s, is_ident_char);
            Tok::Ident(s)
        } else if c.is_ascii_digit() || (c == '.' && cur.peek2().is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur, pos)?
        } else {
            cur.bump();
            match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '*' => Tok::Star,
                '+' => Tok::Plus,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    Tok::Arrow
                }
                '-' => Tok::Minus,
                other => {
                    return Err(ParseError::new(pos, format!("unexpected character {other:?}")))
                }
            }
        };
        let end = cur.pos();
        out.push(Token { tok, pos, end });
    }
}

fn lex_number(cur: &mut Cursor<'_>, pos: Pos) -> Result<Tok, ParseError> {
    let mut text = String::new();
    cur.take_while(&mut text, |c| c.is_ascii_digit());
    if cur.peek() == Some('.') {
        text.push('.');
        cur.bump();
        cur.take_while(&mut text, |c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let after = cur.peek2();
        let signed = matches!(after, Some('+' | '-'));
        let digits_follow = if signed {
            let mut it = cur.chars.clone();
            it.next();
            it.next();
            it.next().is_some_and(|(_, c)| c.is_ascii_digit())
        } else {
            after.is_some_and(|c| c.is_ascii_digit())
        };
        if digits_follow {
            text.push('e');
            cur.bump();
            if signed {
                text.push(cur.bump().expect("sign"));
            }
            cur.take_while(&mut text, |c| c.is_ascii_digit());
        }
    }
    let imag = cur.peek() == Some('i') && !cur.peek2().is_some_and(is_ident_char);
    if imag {
        cur.bump();
    }
    if cur.peek().is_some_and(is_ident_char) {
        let mut rest = String::new();
        cur.take_while(&mut rest, is_ident_char);
        return Err(ParseError::new(pos, format!("malformed number `{text}{rest}`")));
    }
    Ok(Tok::Number { text, imag })
}
