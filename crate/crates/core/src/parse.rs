//! Recursive-descent parser for polynomial expressions with Gaussian-rational
//! coefficients over a caller-supplied variable set.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary ('*' unary)*`,
//! `unary := ('-'|'+') unary | power`, `power := atom ('^' integer)?`,
//! `atom := number | 'i' | variable | '(' expr ')'`. Numbers are integers,
//! decimals or `p/q` literals.

use thiserror::Error;

use crate::exact::{parse_rational, GaussianRational};
use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

pub fn parse_polynomial<F>(text: &str, nvars: usize, lookup: F) -> Result<Poly, ParseError>
where
    F: Fn(&str) -> Option<usize>,
{
    let mut parser = Parser { src: text.as_bytes(), pos: 0, nvars, lookup: &lookup };
    parser.skip_ws();
    if parser.at_end() {
        return Err(parser.error("empty expression"));
    }
    let poly = parser.expr()?;
    parser.skip_ws();
    if !parser.at_end() {
        return Err(parser.error(format!("unexpected `{}`", parser.src[parser.pos] as char)));
    }
    Ok(poly)
}

struct Parser<'a, F> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
    lookup: &'a F,
}

impl<F: Fn(&str) -> Option<usize>> Parser<'_, F> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: message.into() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                acc = &acc * &self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a nonnegative integer exponent"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let e: u32 = text.parse().map_err(|_| ParseError { position: start, message: "exponent too large".into() })?;
        if e > 64 {
            return Err(ParseError { position: start, message: "exponent too large".into() });
        }
        Ok(base.pow(e))
    }

    fn unary(&mut self) -> Result<Poly, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn atom(&mut self) -> Result<Poly, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                    self.pos += 1;
                }
                // a `/` directly followed by digits belongs to the literal
                if self.peek() == Some(b'/') && matches!(self.src.get(self.pos + 1), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                    while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let r = parse_rational(text).map_err(|e| ParseError { position: start, message: e.to_string() })?;
                Ok(Poly::constant(self.nvars, GaussianRational::real(r)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "i" {
                    return Ok(Poly::constant(self.nvars, GaussianRational::i()));
                }
                match (self.lookup)(name) {
                    Some(v) if v < self.nvars => Ok(Poly::var(self.nvars, v)),
                    _ => Err(ParseError { position: start, message: format!("unknown variable `{name}`") }),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{}`", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn xyz(name: &str) -> Option<usize> {
        match name {
            "x" => Some(0),
            "y" => Some(1),
            _ => None,
        }
    }

    #[test]
    fn arithmetic() {
        let p = parse_polynomial("(x + 1/2*y)^2 - x*x", 2, xyz).unwrap();
        assert_eq!(p.coefficient(&[1, 1]), GaussianRational::from_int(1));
        assert_eq!(p.coefficient(&[0, 2]), GaussianRational::real(rat(1, 4)));
        assert_eq!(p.coefficient(&[2, 0]), GaussianRational::from_int(0));
        let q = parse_polynomial("-2.5 + i*y", 2, xyz).unwrap();
        assert_eq!(q.constant_term(), GaussianRational::real(rat(-5, 2)));
        assert_eq!(q.coefficient(&[0, 1]), GaussianRational::i());
        let r = parse_polynomial("-x^2 + 2*-y", 2, xyz).unwrap();
        assert_eq!(r.coefficient(&[2, 0]), GaussianRational::from_int(-1));
        assert_eq!(r.coefficient(&[0, 1]), GaussianRational::from_int(-2));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_polynomial("x + z", 2, xyz).unwrap_err();
        assert_eq!(e.position, 4);
        assert!(parse_polynomial("x +", 2, xyz).is_err());
        assert!(parse_polynomial("(x", 2, xyz).is_err());
        assert!(parse_polynomial("x^y", 2, xyz).is_err());
        assert!(parse_polynomial("", 2, xyz).is_err());
        assert_eq!(parse_polynomial("x y", 2, xyz).unwrap_err().position, 2);
    }
}
