//! Reading polynomials and factorizations from text.
//!
//! Polynomials are accepted either as term-map JSON (`{"terms": [...]}`) or
//! as expressions such as `(t^2 - i)*s^2 + (2*j*t)*s + (i*t^2 - 1)`.
//! Products are noncommutative and evaluated left to right; juxtaposition
//! means multiplication and binds like `*`. Division is allowed by real
//! constants only, and `sqrt(c)` takes a nonnegative real constant.

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::quat_poly::QuatPoly;
use crate::uni_factor::Factorization;

/// Parses a polynomial from JSON or expression syntax.
pub fn parse_poly(text: &str) -> Result<QuatPoly> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return Ok(serde_json::from_str(trimmed)?);
    }
    parse_expr(text)
}

/// Parses a factorization in its JSON form.
pub fn parse_factorization(text: &str) -> Result<Factorization> {
    Ok(serde_json::from_str(text.trim())?)
}

/// Parses an expression.
pub fn parse_expr(text: &str) -> Result<QuatPoly> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse { offset: self.pos, message: message.to_string() }
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

    fn expr(&mut self) -> Result<QuatPoly> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<QuatPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = real_constant(&d).ok_or_else(|| self.error("can only divide by a real constant"))?;
                    if c == 0.0 {
                        return Err(self.error("division by zero"));
                    }
                    acc = acc.scale(1.0 / c);
                }
                Some(c) if c == b'(' || c == b'.' || c.is_ascii_alphanumeric() => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<QuatPoly> {
        let base = self.atom()?;
        if self.eat(b'^') {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
            let e: u32 = digits.parse().map_err(|_| self.error("expected a nonnegative integer exponent"))?;
            let mut out = QuatPoly::one();
            for _ in 0..e {
                out = out.mul(&base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<QuatPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let x = self.number()?;
                Ok(QuatPoly::constant(Quaternion::real(x)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let mut word = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                // `ts`, `ij`, ... are juxtaposed single-letter symbols
                if word.len() > 1 && word.bytes().all(|c| b"ijkts".contains(&c)) {
                    word = &word[..1];
                    self.pos = start + 1;
                }
                let unit = |q| Ok(QuatPoly::constant(q));
                match word {
                    "i" => unit(Quaternion::I),
                    "j" => unit(Quaternion::J),
                    "k" => unit(Quaternion::K),
                    "t" => Ok(QuatPoly::monomial(1, 0, Quaternion::ONE)),
                    "s" => Ok(QuatPoly::monomial(0, 1, Quaternion::ONE)),
                    "sqrt" => {
                        if !self.eat(b'(') {
                            return Err(self.error("expected '(' after sqrt"));
                        }
                        let e = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.error("expected ')'"));
                        }
                        match real_constant(&e) {
                            Some(c) if c >= 0.0 => Ok(QuatPoly::constant(Quaternion::real(c.sqrt()))),
                            _ => Err(self.error("sqrt needs a nonnegative real constant")),
                        }
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown symbol '{word}'")))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        s.parse().map_err(|_| Error::Parse { offset: start, message: format!("bad number '{s}'") })
    }
}

fn real_constant(p: &QuatPoly) -> Option<f64> {
    if p.is_zero() {
        return Some(0.0);
    }
    if p.bidegree() != (0, 0) {
        return None;
    }
    let c = p.coeff(0, 0);
    (c.imag().is_zero()).then_some(c.w)
}
