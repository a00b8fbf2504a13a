//! Text form of a generating-function system.
//!
//! ```text
//! # Catalan numbers
//! c = 1 + x*c^2
//! out := c
//! ```
//!
//! One definition per line. `name = expr` defines an unknown, `name := expr`
//! the output series (exactly one). An expression is a sum of monomials,
//! each a `*`-product of numbers (`3`, `0.25`, `2/3`), powers of `x`
//! (`x`, `x^2`) and unknowns (`A`, `A^2`). `#` starts a comment.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest accepted exponent on `x` or an unknown.
pub const MAX_POWER: u32 = 64;
/// Longest accepted numeric literal.
const MAX_DIGITS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct RawTerm {
    pub coef: BigRational,
    pub x_power: usize,
    pub factors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawDefinition {
    pub line: usize,
    pub name: String,
    pub is_output: bool,
    pub terms: Vec<RawTerm>,
}

pub fn parse_definitions(text: &str) -> Result<Vec<RawDefinition>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        out.push(parse_line(body, line)?);
    }
    Ok(out)
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

fn parse_line(body: &str, line: usize) -> Result<RawDefinition> {
    let (lhs, rhs, is_output) = if let Some(i) = body.find(":=") {
        (&body[..i], &body[i + 2..], true)
    } else if let Some(i) = body.find('=') {
        (&body[..i], &body[i + 1..], false)
    } else {
        return err(line, "expected `name = expr` or `name := expr`");
    };
    let name = lhs.trim();
    if !is_ident(name) {
        return err(line, format!("bad name {name:?}"));
    }
    if name == "x" {
        return err(line, "`x` is the series variable, not an unknown");
    }
    let mut cur = Cursor { s: rhs.as_bytes(), pos: 0, line };
    let terms = cur.expr()?;
    Ok(RawDefinition { line, name: name.to_string(), is_output, terms })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        err(self.line, format!("column {}: {}", self.pos + 1, msg.into()))
    }

    fn expr(&mut self) -> Result<Vec<RawTerm>> {
        let mut terms = Vec::new();
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            _ => 1,
        };
        loop {
            let mut t = self.term()?;
            if sign < 0 {
                t.coef = -t.coef;
            }
            terms.push(t);
            match self.peek() {
                None => break,
                Some(b'+') => sign = 1,
                Some(b'-') => sign = -1,
                Some(c) => return self.fail(format!("unexpected {:?}", c as char)),
            }
            self.pos += 1;
        }
        Ok(terms)
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut t = RawTerm { coef: BigRational::one(), x_power: 0, factors: Vec::new() };
        loop {
            self.factor(&mut t)?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        t.factors.sort();
        Ok(t)
    }

    fn factor(&mut self, t: &mut RawTerm) -> Result<()> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let n = self.number()?;
                t.coef *= n;
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or_default().to_string();
                let k = self.power()?;
                if name == "x" {
                    t.x_power += k as usize;
                } else {
                    if t.factors.len() + k as usize > MAX_POWER as usize {
                        return self.fail("too many factors in one monomial");
                    }
                    for _ in 0..k {
                        t.factors.push(name.clone());
                    }
                }
                if t.x_power > MAX_POWER as usize {
                    return self.fail("power of x too large");
                }
            }
            Some(c) => return self.fail(format!("expected a factor, found {:?}", c as char)),
            None => return self.fail("expected a factor, found end of line"),
        }
        Ok(())
    }

    fn power(&mut self) -> Result<u32> {
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let digits = self.digits();
        if digits.is_empty() {
            return self.fail("expected an exponent");
        }
        match digits.parse::<u32>() {
            Ok(k) if k <= MAX_POWER => Ok(k),
            _ => self.fail(format!("exponent {digits} exceeds {MAX_POWER}")),
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).into_owned()
    }

    fn number(&mut self) -> Result<BigRational> {
        let int = self.digits();
        let mut frac = String::new();
        if self.s.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int.is_empty() && frac.is_empty() {
            return self.fail("malformed number");
        }
        if int.len() + frac.len() > MAX_DIGITS {
            return self.fail("numeric literal too long");
        }
        let mut value = decimal(&int, &frac);
        if frac.is_empty() && self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let den = self.digits();
            if den.is_empty() || den.len() > MAX_DIGITS {
                return self.fail("malformed denominator");
            }
            let d: BigInt = den.parse().unwrap_or_default();
            if d.is_zero() {
                return self.fail("zero denominator");
            }
            value /= BigRational::from_integer(d);
        }
        Ok(value)
    }
}

fn decimal(int: &str, frac: &str) -> BigRational {
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap_or_default() };
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    BigRational::new(num, den)
}

/// Parses a rational literal: integer, decimal (`0.4`) or fraction (`2/3`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let mut c = Cursor { s: s.trim().as_bytes(), pos: 0, line: 1 };
    let neg = c.peek() == Some(b'-');
    if neg {
        c.pos += 1;
    }
    let v = c.number()?;
    if c.peek().is_some() {
        return c.fail("trailing characters after number");
    }
    Ok(if neg { -v } else { v })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parses_monomials() {
        let defs = parse_definitions("A = 1 + 3/2*x^2*B*A - 0.25 * x * A^2 # tail\n\n out := A").unwrap();
        assert_eq!(defs.len(), 2);
        let a = &defs[0];
        assert_eq!(a.name, "A");
        assert!(!a.is_output);
        assert_eq!(a.terms[0], RawTerm { coef: r(1, 1), x_power: 0, factors: vec![] });
        assert_eq!(
            a.terms[1],
            RawTerm { coef: r(3, 2), x_power: 2, factors: vec!["A".into(), "B".into()] }
        );
        assert_eq!(
            a.terms[2],
            RawTerm { coef: r(-1, 4), x_power: 1, factors: vec!["A".into(), "A".into()] }
        );
        assert!(defs[1].is_output);
        assert_eq!(defs[1].line, 3);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["A 1", "= 1", "x = 1", "A = 1 +", "A = 2/0", "A = x^999", "A = (1)", "A = 1..2", "A = B^65"] {
            assert!(matches!(parse_definitions(bad), Err(Error::Parse { .. })), "{bad}");
        }
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("0.4").unwrap(), r(2, 5));
        assert_eq!(parse_rational("2/3").unwrap(), r(2, 3));
        assert_eq!(parse_rational("-7").unwrap(), r(-7, 1));
        assert!(parse_rational("1/2/3").is_err());
        assert!(parse_rational("").is_err());
    }
}
