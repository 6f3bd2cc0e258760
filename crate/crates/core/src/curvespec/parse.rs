//! Recursive-descent parser for coordinate expressions.
//!
//! Precedence, tightest first: `^` (literal rational exponent), unary minus,
//! `*` `/`, `+` `-`. Binary operators associate to the left.

use crate::error::{Error, Result};
use crate::jet::Rational;

use super::ast::{BinOp, Constant, Expr, Func};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, text: String },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn syntax(offset: usize, expected: &[&str]) -> Error {
    Error::Syntax {
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

const ATOM_START: &[&str] = &["number", "s", "pi", "e", "function", "(", "-"];

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent suffix only when followed by digits, so `2e` stays an error
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit.parse().map_err(|_| syntax(start, &["number"]))?;
                out.push(Token {
                    tok: Tok::Num {
                        value,
                        text: lit.to_string(),
                    },
                    offset: start,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Ident(text[start..i].to_string()),
                    offset: start,
                });
                continue;
            }
            _ => return Err(syntax(start, ATOM_START)),
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    out.push(Token {
        tok: Tok::End,
        offset: text.len(),
    });
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
        if !matches!(t.tok, Tok::End) {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek().tok, Tok::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek().tok, Tok::Caret) {
            self.bump();
            let r = self.rational()?;
            return Ok(Expr::Pow(Box::new(base), r));
        }
        Ok(base)
    }

    /// `[-] number` or `( [-] integer [/ integer] )`.
    fn rational(&mut self) -> Result<Rational> {
        const EXPECTED: &[&str] = &["rational exponent"];
        if matches!(self.peek().tok, Tok::LParen) {
            self.bump();
            let neg = self.eat_minus();
            let num = self.integer()?;
            let mut r = Rational::integer(num);
            if matches!(self.peek().tok, Tok::Slash) {
                self.bump();
                let at = self.peek().offset;
                let den = self.integer()?;
                r = Rational::new(num, den).ok_or_else(|| syntax(at, &["nonzero denominator"]))?;
            }
            self.expect_rparen()?;
            if neg {
                r.num = -r.num;
            }
            return Ok(r);
        }
        let neg = self.eat_minus();
        let t = self.bump();
        let mut r = match &t.tok {
            Tok::Num { text, .. } => {
                decimal_rational(text).ok_or_else(|| syntax(t.offset, EXPECTED))?
            }
            _ => return Err(syntax(t.offset, EXPECTED)),
        };
        if neg {
            r.num = -r.num;
        }
        Ok(r)
    }

    fn eat_minus(&mut self) -> bool {
        if matches!(self.peek().tok, Tok::Minus) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let t = self.bump();
        if let Tok::Num { text, .. } = &t.tok {
            if let Ok(n) = text.parse::<i64>() {
                return Ok(n);
            }
        }
        Err(syntax(t.offset, &["integer"]))
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.bump();
        match t.tok {
            Tok::RParen => Ok(()),
            Tok::Comma => Err(Error::Arity {
                offset: t.offset,
                message: "functions take exactly one argument".into(),
            }),
            _ => Err(syntax(t.offset, &[")", "+", "-", "*", "/", "^"])),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, .. } => Ok(Expr::Num(value)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let is_call = matches!(self.peek().tok, Tok::LParen);
                match (name.as_str(), is_call) {
                    ("s", false) => Ok(Expr::Param),
                    ("pi", false) => Ok(Expr::Const(Constant::Pi)),
                    ("e", false) => Ok(Expr::Const(Constant::E)),
                    (_, true) => {
                        let f = Func::from_name(&name).ok_or_else(|| {
                            syntax(t.offset, &Func::ALL.map(|f| f.name()))
                        })?;
                        let open = self.bump();
                        if matches!(self.peek().tok, Tok::RParen) {
                            return Err(Error::Arity {
                                offset: open.offset,
                                message: format!("{} takes exactly one argument", f.name()),
                            });
                        }
                        let arg = self.expr()?;
                        self.expect_rparen()?;
                        Ok(Expr::call(f, arg))
                    }
                    (_, false) => Err(syntax(t.offset, &["s", "pi", "e", "function call"])),
                }
            }
            _ => Err(syntax(t.offset, ATOM_START)),
        }
    }
}

/// Exact rational from a plain decimal literal such as `2`, `0.5`, `1.25`.
fn decimal_rational(text: &str) -> Option<Rational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 12 {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let int_v: i64 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let frac_v: i64 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
    Rational::new(int_v.checked_mul(den)?.checked_add(frac_v)?, den)
}

/// Parse one expression; the whole input must be consumed.
pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut list = parse_expr_list(text)?;
    if list.len() != 1 {
        return Err(Error::Arity {
            offset: 0,
            message: format!("expected one expression, found {}", list.len()),
        });
    }
    Ok(list.pop().unwrap())
}

/// Parse a comma-separated list of expressions.
pub fn parse_expr_list(text: &str) -> Result<Vec<Expr>> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut out = vec![p.expr()?];
    loop {
        let t = p.bump();
        match t.tok {
            Tok::End => return Ok(out),
            Tok::Comma => out.push(p.expr()?),
            Tok::RParen => return Err(syntax(t.offset, &[",", "end of input"])),
            _ => {
                return Err(syntax(
                    t.offset,
                    &[",", "+", "-", "*", "/", "^", "end of input"],
                ))
            }
        }
    }
}
