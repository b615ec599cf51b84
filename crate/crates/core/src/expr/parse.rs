//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | base ("^" factor)?
//! base   := NUMBER | "x" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC   := "exp" | "ln" | "sin" | "cos" | "sqrt" | "abs"
//! NUMBER := integer or decimal literal
//! ```
//!
//! Exponentiation is right-associative and binds tighter than unary minus,
//! so `-x^2` is the negation of `x^2`. A quotient of two literal constants
//! folds to one rational constant (`2/3` is the number two-thirds), which
//! is what lets rational constants print and re-parse losslessly; quotients
//! involving the variable are ordinary division nodes.

use thiserror::Error;

use super::{ExprAst, UnaryOp};
use crate::{Q, Z};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { offset, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Var,
    Func(UnaryOp),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            b'/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            b'^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut frac_digits = 0usize;
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let frac_start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_digits = i - frac_start;
                    if frac_digits == 0 && i - start == 1 {
                        return err(start, "expected digits in numeric literal");
                    }
                }
                let text = &src[start..i];
                let digits: String = text.chars().filter(|c| *c != '.').collect();
                let numer: Z = digits
                    .parse()
                    .map_err(|_| ParseError {
                        offset: start,
                        message: format!("invalid numeric literal `{text}`"),
                    })?;
                let denom = Z::from(10u32).pow(frac_digits as u32);
                toks.push((start, Tok::Num(Q::new(numer, denom))));
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let ident = &src[start..i];
                let tok = match ident {
                    "x" => Tok::Var,
                    "exp" => Tok::Func(UnaryOp::Exp),
                    "ln" => Tok::Func(UnaryOp::Ln),
                    "sin" => Tok::Func(UnaryOp::Sin),
                    "cos" => Tok::Func(UnaryOp::Cos),
                    "sqrt" => Tok::Func(UnaryOp::Sqrt),
                    "abs" => Tok::Func(UnaryOp::Abs),
                    _ => {
                        return err(start, format!("unknown identifier `{ident}`"));
                    }
                };
                toks.push((start, tok));
            }
            _ => {
                return err(i, format!("unexpected character `{}`", src[i..].chars().next().unwrap()));
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::add(lhs, rhs);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = ExprAst::sub(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = ExprAst::mul(lhs, rhs);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.factor()?;
                    lhs = ExprAst::div(lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.factor()?;
            return Ok(ExprAst::neg(inner));
        }
        let base = self.base()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let exponent = self.factor()?;
            return Ok(ExprAst::pow(base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<ExprAst, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(q)) => Ok(ExprAst::Const(q)),
            Some(Tok::Var) => Ok(ExprAst::Var),
            Some(Tok::Func(op)) => {
                if !matches!(self.peek(), Some(Tok::LParen)) {
                    return err(self.offset(), format!("expected `(` after `{}`", op.name()));
                }
                self.bump();
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return err(self.offset(), "expected `)`");
                }
                self.bump();
                Ok(ExprAst::unary(op, inner))
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                if !matches!(self.peek(), Some(Tok::RParen)) {
                    return err(self.offset(), "expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Some(tok) => err(offset, format!("unexpected token {tok:?}")),
            None => err(offset, "unexpected end of input"),
        }
    }
}

/// Parses a source string into an expression tree.
pub fn parse(src: &str) -> Result<ExprAst, ParseError> {
    let toks = lex(src)?;
    let mut parser = Parser { toks: &toks, pos: 0, len: src.len() };
    let ast = parser.expr()?;
    if parser.pos != toks.len() {
        return err(parser.offset(), "trailing input");
    }
    Ok(ast)
}
