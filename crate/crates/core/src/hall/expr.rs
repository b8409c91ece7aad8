//! Parser for coefficient expressions such as `(q^2-1)/(q-1)` or
//! `q^-1*I[1,0,-1]^2 - 1/2`.
//!
//! Grammar: sums and differences of products and quotients of powers; atoms
//! are integers, `q`, `I[r,l..,s]` and parenthesized expressions. Division and
//! negative powers are allowed only when the operand is free of symbols.

use num_bigint::BigInt;
use thiserror::Error;

use super::formal::FormalPoly;
use super::ratfunc::RatFunc;
use crate::arith::Q;
use crate::lattice::MukaiVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unexpected {found} at offset {pos}")]
    Unexpected { pos: usize, found: String },
    #[error("symbol I[...] needs at least rank and s")]
    ShortSymbol,
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by or negative power of an expression with symbols")]
    NotInvertible,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Q,
    Sym(Vec<i64>),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let unexpected = |pos: usize, found: &str| ExprError::Unexpected { pos, found: found.to_string() };
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '0'..='9' => {
                let st = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((st, Tok::Int(s[st..i].parse().unwrap())));
            }
            'q' => {
                out.push((i, Tok::Q));
                i += 1;
            }
            'I' => {
                let st = i;
                if b.get(i + 1) != Some(&b'[') {
                    return Err(unexpected(i, "I"));
                }
                let close = s[i..].find(']').ok_or_else(|| unexpected(i, "unterminated I["))? + i;
                let nums: Result<Vec<i64>, _> = s[i + 2..close].split(',').map(|x| x.trim().parse::<i64>()).collect();
                let nums = nums.map_err(|_| unexpected(st, &s[st..=close]))?;
                if nums.len() < 2 {
                    return Err(ExprError::ShortSymbol);
                }
                out.push((st, Tok::Sym(nums)));
                i = close + 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push((i, Tok::Op(c)));
                i += 1;
            }
            _ => return Err(unexpected(i, &c.to_string())),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn err(&self) -> ExprError {
        match self.toks.get(self.pos) {
            Some((p, t)) => ExprError::Unexpected { pos: *p, found: format!("{t:?}") },
            None => ExprError::Unexpected { pos: self.len, found: "end of input".into() },
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FormalPoly, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FormalPoly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?.as_lambda().ok_or(ExprError::NotInvertible)?;
                let inv = d.inv().map_err(|_| ExprError::DivisionByZero)?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FormalPoly, ExprError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let n = match self.peek() {
            Some(Tok::Int(n)) => i64::try_from(n).map_err(|_| self.err())?,
            _ => return Err(self.err()),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(self.err());
        }
        Ok(if neg { -n } else { n })
    }

    fn power(&mut self) -> Result<FormalPoly, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let k = self.exponent()?;
        if k >= 0 {
            return Ok(base.pow(k as u32));
        }
        let l = base.as_lambda().ok_or(ExprError::NotInvertible)?;
        Ok(l.pow(k).map_err(|_| ExprError::DivisionByZero)?.into())
    }

    fn atom(&mut self) -> Result<FormalPoly, ExprError> {
        let t = self.peek().cloned().ok_or_else(|| self.err())?;
        match t {
            Tok::Int(n) => {
                self.pos += 1;
                Ok(RatFunc::constant(Q::from_integer(n)).into())
            }
            Tok::Q => {
                self.pos += 1;
                Ok(RatFunc::q_pow(1).into())
            }
            Tok::Sym(c) => {
                self.pos += 1;
                let n = c.len();
                Ok(FormalPoly::symbol(&MukaiVector::new(c[0], c[1..n - 1].to_vec(), c[n - 1])))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err());
                }
                Ok(e)
            }
            _ => Err(self.err()),
        }
    }
}

pub fn parse_value(s: &str) -> Result<FormalPoly, ExprError> {
    let mut p = Parser { toks: lex(s)?, pos: 0, len: s.len() };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Poly};

    #[test]
    fn quotients() {
        let v = parse_value("(q^2-1)/(q-1)").unwrap();
        assert_eq!(v, RatFunc::from_poly(Poly::new(vec![q(1, 1), q(1, 1)])).into());
        assert_eq!(parse_value("q^-2*q^3").unwrap(), RatFunc::q_pow(1).into());
        assert_eq!(parse_value("q^(-1)").unwrap(), RatFunc::q_pow(-1).into());
        assert_eq!(parse_value("-1/2").unwrap(), RatFunc::constant(q(-1, 2)).into());
    }

    #[test]
    fn symbols() {
        let v = parse_value("2*I[1,0,-1]^2 - I[0,1,0]").unwrap();
        let a = FormalPoly::symbol(&MukaiVector::new(1, vec![0], -1));
        let b = FormalPoly::symbol(&MukaiVector::new(0, vec![1], 0));
        assert_eq!(v, a.pow(2).scale(&RatFunc::integer(2)).sub(&b));
        assert_eq!(parse_value("1/I[1,0,0]"), Err(ExprError::NotInvertible));
    }

    #[test]
    fn errors() {
        assert_eq!(parse_value("1/0"), Err(ExprError::DivisionByZero));
        assert!(matches!(parse_value("q +"), Err(ExprError::Unexpected { .. })));
        assert!(matches!(parse_value("x"), Err(ExprError::Unexpected { .. })));
        assert!(matches!(parse_value("(q"), Err(ExprError::Unexpected { .. })));
        assert_eq!(parse_value("I[1]"), Err(ExprError::ShortSymbol));
    }

    #[test]
    fn printer_round_trip() {
        for s in ["(q^2-1)/(q-1)", "q^-3*I[1,0,-1]^2 - 1/2*I[0,1,0] + 7", "(q-1)^-1", "0", "-q*I[2,1,-3]*I[0,0,1]"] {
            let v = parse_value(s).unwrap();
            assert_eq!(parse_value(&v.to_string()).unwrap(), v, "{s} -> {v}");
        }
    }
}
