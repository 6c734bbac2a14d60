//! Tiny arithmetic expression evaluator for high-precision constants such
//! as `sqrt(2)/pi` or `1.5e-3`.
//!
//! Grammar: `+ - * / ^`, parentheses, the constant `pi`, and the functions
//! `sqrt`, `exp`, `ln`, `cos`, `sin`. Decimal literals are parsed directly
//! at the evaluation precision, never through `f64`.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::context::PrecisionContext;
use crate::error::{Error, Result};

/// Evaluate `src` at working precision, computing internally with guard bits.
pub fn eval_expr(src: &str, ctx: &PrecisionContext) -> Result<Float> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        prec: ctx.guard_bits(),
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    if !v.is_finite() {
        return Err(Error::Parse(format!("{src:?} does not evaluate to a finite number")));
    }
    Ok(ctx.real(v))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    prec: u32,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!(
            "{msg} at offset {} in {:?}",
            self.pos,
            String::from_utf8_lossy(self.src)
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Float> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Float> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc *= self.unary()?;
            } else if self.eat(b'/') {
                let d = self.unary()?;
                if d.is_zero() {
                    return Err(self.error("division by zero"));
                }
                acc /= d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Float> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Float> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.unary()?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Float> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                if name == "pi" {
                    return Ok(Float::with_val(self.prec, Constant::Pi));
                }
                if !self.eat(b'(') {
                    return Err(self.error("expected '(' after function name"));
                }
                let arg = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                match name {
                    "sqrt" => Ok(arg.sqrt()),
                    "exp" => Ok(arg.exp()),
                    "ln" => Ok(arg.ln()),
                    "cos" => Ok(arg.cos()),
                    "sin" => Ok(arg.sin()),
                    _ => Err(self.error(&format!("unknown function {name:?}"))),
                }
            }
            _ => Err(self.error("expected a number, constant or '('")),
        }
    }

    fn number(&mut self) -> Result<Float> {
        let start = self.pos;
        let s = self.src;
        let digits = |p: &mut usize| {
            while *p < s.len() && s[*p].is_ascii_digit() {
                *p += 1;
            }
        };
        digits(&mut self.pos);
        if self.pos < s.len() && s[self.pos] == b'.' {
            self.pos += 1;
            digits(&mut self.pos);
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(&mut self.pos);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let lit = std::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        let parsed = Float::parse(lit).map_err(|_| self.error("malformed number"))?;
        Ok(Float::with_val(self.prec, parsed))
    }
}
