use crate::circuit::Label;
use crate::syntax::{Pos, Span};

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    Label(Label),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Colon,
    Eq,
    Backslash,
    BackslashPrime,
    Arrow,
    Lolli,
    Star,
    Bang,
    At,
    HashCirc,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Label(l) => format!("label `{l}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Eq => "=",
            Tok::Backslash => "\\",
            Tok::BackslashPrime => "\\'",
            Tok::Arrow => "->",
            Tok::Lolli => "-o",
            Tok::Star => "*",
            Tok::Bang => "!",
            Tok::At => "@",
            Tok::HashCirc => "#circ",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'ℓ' || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() && c != 'ℓ' || c == '_' || c == '\''
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        let offset = self.chars.get(self.i).map_or(self.src.len(), |c| c.0);
        Pos {
            offset,
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.i + 1).map(|c| c.1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') if self.peek2() == Some('-') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
        }
        s
    }

    fn next(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        let c = match self.peek() {
            None => {
                return Ok(Token {
                    tok: Tok::Eof,
                    span: Span::new(start, start),
                })
            }
            Some(c) => c,
        };
        let err = |msg: String, end: Pos| ParseError {
            span: Span::new(start, end),
            message: msg,
        };
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = self.peek().filter(|c| is_ident_char(*c)) {
                s.push(c);
                self.bump();
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let s = self.digits();
            let n = s
                .parse::<u64>()
                .map_err(|_| err(format!("numeral `{s}` is too large"), self.pos()))?;
            Tok::Num(n)
        } else if c == 'ℓ' {
            self.bump();
            let bit = self.peek() == Some('b');
            if bit {
                self.bump();
            }
            let s = self.digits();
            let id = s
                .parse::<u32>()
                .map_err(|_| err("malformed label".to_string(), self.pos()))?;
            Tok::Label(if bit {
                Label::bit(id)
            } else {
                Label::qubit(id)
            })
        } else {
            self.bump();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '=' => Tok::Eq,
                '*' => Tok::Star,
                '!' => Tok::Bang,
                '@' => Tok::At,
                '\\' => {
                    if self.peek() == Some('\'') {
                        self.bump();
                        Tok::BackslashPrime
                    } else {
                        Tok::Backslash
                    }
                }
                '-' => match self.peek() {
                    Some('>') => {
                        self.bump();
                        Tok::Arrow
                    }
                    Some('o') => {
                        self.bump();
                        Tok::Lolli
                    }
                    _ => return Err(err("unexpected character `-`".to_string(), self.pos())),
                },
                '#' => {
                    let mut s = String::new();
                    while let Some(c) = self.peek().filter(|c| c.is_alphanumeric()) {
                        s.push(c);
                        self.bump();
                    }
                    if s != "circ" {
                        return Err(err(format!("unknown directive `#{s}`"), self.pos()));
                    }
                    Tok::HashCirc
                }
                other => return Err(err(format!("unexpected character `{other}`"), self.pos())),
            }
        };
        Ok(Token {
            tok,
            span: Span::new(start, self.pos()),
        })
    }
}

/// Tokenizes a whole source file. The final token is always `Eof`.
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: src.char_indices().collect(),
        src,
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let done = t.tok == Tok::Eof;
        out.push(t);
        if done {
            return Ok(out);
        }
    }
}
