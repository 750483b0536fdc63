use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use super::{BinOp, Expr, Func};
use crate::arith::Rational;

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: expected {}, found {}", self.line, self.column, self.expected.join(" or "), self.found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
        } else if c.is_whitespace() {
            chars.next();
            column += 1;
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                chars.next();
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Int(s.parse().expect("digits")), line: l, column: col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_alphanumeric() || **d == '_') {
                s.push(d);
                chars.next();
                column += 1;
            }
            out.push(Token { tok: Tok::Ident(s), line: l, column: col });
        } else if "+-*/^(),".contains(c) {
            chars.next();
            column += 1;
            out.push(Token { tok: Tok::Sym(c), line: l, column: col });
        } else {
            return Err(SyntaxError {
                line: l,
                column: col,
                expected: vec!["an expression".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let t = self.peek();
        SyntaxError {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{c}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('+') => BinOp::Add,
                Tok::Sym('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Sym('*') => BinOp::Mul,
                Tok::Sym('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::bin(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Num(Rational::from(n)))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if self.peek().tok != Tok::Sym('(') {
                    return Ok(Expr::Var(name));
                }
                if name == "prod" {
                    return self.prod();
                }
                let func = Func::from_name(&name).ok_or_else(|| {
                    let mut e = self.error(&["an operator"]);
                    e.found = format!("call to unknown function `{name}`");
                    e
                })?;
                self.bump();
                let mut args = vec![self.expr()?];
                while args.len() < func.arity() {
                    self.expect(',')?;
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.error(&["a number", "a variable", "`(`", "`-`"])),
        }
    }

    fn prod(&mut self) -> Result<Expr, SyntaxError> {
        self.expect('(')?;
        let var = match self.peek().tok.clone() {
            Tok::Ident(v) => {
                self.bump();
                v
            }
            _ => return Err(self.error(&["an index variable"])),
        };
        self.expect(',')?;
        let lo = self.expr()?;
        self.expect(',')?;
        let hi = self.expr()?;
        self.expect(',')?;
        let body = self.expr()?;
        self.expect(')')?;
        Ok(Expr::Prod { var, lo: Box::new(lo), hi: Box::new(hi), body: Box::new(body) })
    }
}

pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    parse_at(text, 0)
}

/// Parses `text`, reporting positions as if it began `line_offset` lines down.
pub(crate) fn parse_at(text: &str, line_offset: usize) -> Result<Expr, SyntaxError> {
    let shift = |mut e: SyntaxError| {
        e.line += line_offset;
        e
    };
    let mut p = Parser { toks: lex(text).map_err(shift)?, pos: 0 };
    let e = p.expr().map_err(shift)?;
    if p.peek().tok != Tok::End {
        return Err(shift(p.error(&["an operator", "end of input"])));
    }
    Ok(e)
}
